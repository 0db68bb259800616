//! Text format of linear systems.
//!
//! ```text
//! # comment
//! vars: R1 R2
//! nonneg: B1 B2
//! eliminate: R2
//! R1 + 1/2 R2 <= B1 + 2 B2
//! R2 >= 0
//! ```
//!
//! `vars:` and `eliminate:` are optional; undeclared names that are not constants become
//! variables in order of appearance. Strict `<` and `>` are read as their closures and `=` adds
//! both inequalities.

use super::{FmeError, LinSystem};
use crate::scalar::Exact;

/// Parsed system together with its `eliminate:` header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T> {
    pub system: LinSystem<T>,
    pub eliminate: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    Le,
    Ge,
    Eq,
}

type Terms<T> = Vec<(T, String)>;

fn err(line: usize, message: impl Into<String>) -> FmeError {
    FmeError::Parse { line, message: message.into() }
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn split_relation(line: usize, s: &str) -> Result<(&str, Rel, &str), FmeError> {
    let ops = [("<=", Rel::Le), (">=", Rel::Ge), ("<", Rel::Le), (">", Rel::Ge), ("=", Rel::Eq)];
    for (op, rel) in ops {
        if let Some(pos) = s.find(op) {
            let (lhs, rhs) = (&s[..pos], &s[pos + op.len()..]);
            if rhs.contains(['<', '>', '=']) {
                return Err(err(line, "more than one relation"));
            }
            return Ok((lhs, rel, rhs));
        }
    }
    Err(err(line, "missing relation `<=`, `>=` or `=`"))
}

fn parse_side<T: Exact>(line: usize, s: &str) -> Result<Terms<T>, FmeError> {
    let spaced = s.replace('+', " + ").replace('-', " - ").replace('*', " ");
    let mut terms = Vec::new();
    let mut sign = T::one();
    let mut coef: Option<T> = None;
    let mut pending = false;
    let mut zero_term = false;
    for tok in spaced.split_whitespace() {
        match tok {
            "+" | "-" => {
                if coef.is_some() {
                    return Err(err(line, format!("number without a name before `{tok}`")));
                }
                if tok == "-" {
                    sign = -sign;
                }
                pending = true;
            }
            t if t.starts_with(|c: char| c.is_ascii_digit()) => {
                if coef.is_some() {
                    return Err(err(line, format!("two numbers in a row at `{t}`")));
                }
                let v = t.parse::<T>().map_err(|_| err(line, format!("invalid coefficient `{t}`")))?;
                coef = Some(v);
            }
            t if valid_name(t) => {
                let c = coef.take().unwrap_or_else(T::one);
                terms.push((sign.clone() * c, t.to_string()));
                sign = T::one();
                pending = false;
            }
            t => return Err(err(line, format!("unexpected token `{t}`"))),
        }
    }
    if let Some(c) = coef {
        if !c.is_zero() {
            return Err(err(line, "bare nonzero numbers are not allowed; bounds use named constants"));
        }
        zero_term = true;
        pending = false;
    }
    if pending {
        return Err(err(line, "dangling sign"));
    }
    if terms.is_empty() && !zero_term {
        return Err(err(line, "empty side"));
    }
    Ok(terms)
}

fn names(rest: &str, line: usize) -> Result<Vec<String>, FmeError> {
    rest.split_whitespace()
        .map(|n| if valid_name(n) { Ok(n.to_string()) } else { Err(err(line, format!("invalid name `{n}`"))) })
        .collect()
}

impl<T: Exact> LinSystem<T> {
    /// Parses the text format; errors carry 1-based line numbers.
    pub fn parse(text: &str) -> Result<Parsed<T>, FmeError> {
        let mut vars: Vec<String> = Vec::new();
        let mut consts: Vec<String> = Vec::new();
        let mut eliminate = Vec::new();
        let mut body = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some((key, rest)) = content.split_once(':') {
                let list = names(rest, line)?;
                match key.trim() {
                    "vars" => vars.extend(list),
                    "nonneg" => consts.extend(list),
                    "eliminate" => eliminate.extend(list),
                    k => return Err(err(line, format!("unknown header `{k}`"))),
                }
                continue;
            }
            let (lhs, rel, rhs) = split_relation(line, content)?;
            body.push((line, parse_side::<T>(line, lhs)?, rel, parse_side::<T>(line, rhs)?));
        }
        for (_, lhs, _, rhs) in &body {
            for (_, n) in lhs.iter().chain(rhs) {
                if !consts.contains(n) && !vars.contains(n) {
                    vars.push(n.clone());
                }
            }
        }
        let mut system = LinSystem::new(vars, consts).map_err(|e| err(0, e.to_string()))?;
        for (line, lhs, rel, rhs) in body {
            let mut coef = vec![T::zero(); system.vars.len()];
            let mut bound = vec![T::zero(); system.consts.len()];
            for (c, n) in lhs {
                add_term(&system, &mut coef, &mut bound, n, c, true);
            }
            for (c, n) in rhs {
                add_term(&system, &mut coef, &mut bound, n, c, false);
            }
            if rel != Rel::Ge {
                system.push(coef.clone(), bound.clone()).map_err(|e| err(line, e.to_string()))?;
            }
            if rel != Rel::Le {
                let neg = |v: Vec<T>| v.into_iter().map(|x| -x).collect();
                system.push(neg(coef), neg(bound)).map_err(|e| err(line, e.to_string()))?;
            }
        }
        for v in &eliminate {
            if !system.vars.contains(v) {
                return Err(FmeError::UnknownVariable(v.clone()));
            }
        }
        Ok(Parsed { system, eliminate })
    }
}

fn add_term<T: Exact>(sys: &LinSystem<T>, coef: &mut [T], bound: &mut [T], name: String, c: T, left: bool) {
    if let Some(j) = sys.consts.iter().position(|k| *k == name) {
        bound[j] = bound[j].clone() + if left { -c } else { c };
    } else if let Some(i) = sys.vars.iter().position(|v| *v == name) {
        coef[i] = coef[i].clone() + if left { c } else { -c };
    }
}
