//! Exact Fourier–Motzkin elimination over linear inequalities with symbolic bounds.
//!
//! A row reads `Σ_i a_i x_i ≤ Σ_j b_j c_j` where `x_i` are rate variables and `c_j` are named
//! constants declared nonnegative. Bounds therefore live in the rational span of the constants
//! and elimination never evaluates a capacity expression.

mod derivations;
mod parse;
mod sample;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::scalar::Exact;

pub use derivations::{derivation, Derivation, DERIVATIONS};
pub use parse::Parsed;
pub use sample::{equivalent_sampled, equivalent_sampled_with, DEFAULT_RATE_GRID, MAX_SAMPLE_POINTS};

/// Errors raised by [`LinSystem`] operations and the text format.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FmeError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("name `{0}` declared twice")]
    DuplicateName(String),
    #[error("`{0}` is declared both as a variable and as a constant")]
    NameClash(String),
    #[error("row has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("rate grid of {0} points exceeds the sampling limit")]
    SampleGuard(usize),
    #[error("sampled arithmetic exceeded 128-bit integers")]
    Overflow,
}

/// One inequality `coef · x ≤ bound · c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row<T> {
    pub coef: Vec<T>,
    pub bound: Vec<T>,
}

impl<T: Exact> Row<T> {
    /// True when every variable coefficient is zero.
    pub fn is_constant_only(&self) -> bool {
        self.coef.iter().all(|c| c.is_zero())
    }

    fn scaled(&self, s: &T) -> Row<T> {
        Row {
            coef: self.coef.iter().map(|c| c.clone() * s.clone()).collect(),
            bound: self.bound.iter().map(|b| b.clone() * s.clone()).collect(),
        }
    }

    /// Positive rescaling making the leading nonzero coefficient `±1`; `None` for `0 ≤ 0`.
    fn normalized(&self) -> Option<Row<T>> {
        let lead = self.coef.iter().chain(&self.bound).find(|c| !c.is_zero())?;
        Some(self.scaled(&(T::one() / lead.abs())))
    }
}

/// Linear inequality system over named variables and nonnegative named constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinSystem<T> {
    vars: Vec<String>,
    consts: Vec<String>,
    rows: Vec<Row<T>>,
}

impl<T: Exact> LinSystem<T> {
    /// Empty system; names must be distinct across both lists.
    pub fn new(vars: Vec<String>, consts: Vec<String>) -> Result<Self, FmeError> {
        let mut seen = HashSet::new();
        for v in &vars {
            if !seen.insert(v.as_str()) {
                return Err(FmeError::DuplicateName(v.clone()));
            }
        }
        let mut seen_c = HashSet::new();
        for c in &consts {
            if seen.contains(c.as_str()) {
                return Err(FmeError::NameClash(c.clone()));
            }
            if !seen_c.insert(c.as_str()) {
                return Err(FmeError::DuplicateName(c.clone()));
            }
        }
        Ok(LinSystem { vars, consts, rows: Vec::new() })
    }

    /// Variable names in column order.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Constant names in column order.
    pub fn consts(&self) -> &[String] {
        &self.consts
    }

    /// Rows in insertion order.
    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// True when the system has no rows.
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends `coef · x ≤ bound · c`.
    pub fn push(&mut self, coef: Vec<T>, bound: Vec<T>) -> Result<(), FmeError> {
        if coef.len() != self.vars.len() {
            return Err(FmeError::DimensionMismatch { expected: self.vars.len(), got: coef.len() });
        }
        if bound.len() != self.consts.len() {
            return Err(FmeError::DimensionMismatch { expected: self.consts.len(), got: bound.len() });
        }
        self.rows.push(Row { coef, bound });
        Ok(())
    }

    /// Column of variable `name`.
    pub fn var_index(&self, name: &str) -> Result<usize, FmeError> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| FmeError::UnknownVariable(name.to_string()))
    }

    /// Projects out `var` by pairing rows of opposite sign; the column is dropped.
    pub fn eliminate(&self, var: &str) -> Result<Self, FmeError> {
        let k = self.var_index(var)?;
        let (mut pos, mut neg, mut rows) = (Vec::new(), Vec::new(), Vec::new());
        for r in &self.rows {
            match r.coef[k].signum() {
                s if s.is_positive() => pos.push(r),
                s if s.is_negative() => neg.push(r),
                _ => rows.push(r.clone()),
            }
        }
        for p in &pos {
            for n in &neg {
                let a = p.coef[k].clone();
                let b = -n.coef[k].clone();
                let combine = |x: &[T], y: &[T]| -> Vec<T> {
                    x.iter().zip(y).map(|(u, v)| u.clone() * b.clone() + v.clone() * a.clone()).collect()
                };
                rows.push(Row { coef: combine(&p.coef, &n.coef), bound: combine(&p.bound, &n.bound) });
            }
        }
        for r in &mut rows {
            r.coef.remove(k);
        }
        let mut vars = self.vars.clone();
        vars.remove(k);
        Ok(LinSystem { vars, consts: self.consts.clone(), rows })
    }

    /// Eliminates `vars` in the given order, pruning redundant rows after each step.
    pub fn eliminate_all<S: AsRef<str>>(&self, vars: &[S]) -> Result<Self, FmeError> {
        for v in vars {
            self.var_index(v.as_ref())?;
        }
        let mut sys = self.clone();
        for v in vars {
            sys = sys.eliminate(v.as_ref())?.remove_redundant();
        }
        Ok(sys)
    }

    /// Drops duplicate rows, always-true constant rows and rows dominated by a row with the same
    /// variable part and a bound smaller by a nonnegative combination of constants.
    pub fn remove_redundant(&self) -> Self {
        let mut norm: Vec<Row<T>> = Vec::new();
        let mut seen = HashSet::new();
        for r in &self.rows {
            let Some(r) = r.normalized() else { continue };
            if r.is_constant_only() && r.bound.iter().all(|b| !b.is_negative()) {
                continue;
            }
            if seen.insert(r.clone()) {
                norm.push(r);
            }
        }
        let dominated = |i: usize| {
            norm.iter().enumerate().any(|(j, o)| {
                j != i && o.coef == norm[i].coef && norm[i].bound.iter().zip(&o.bound).all(|(b, c)| b >= c)
            })
        };
        let keep: Vec<bool> = (0..norm.len()).map(|i| !dominated(i)).collect();
        let rows = norm.iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r.clone()).collect();
        LinSystem { vars: self.vars.clone(), consts: self.consts.clone(), rows }
    }

    /// Variables that appear with a nonzero coefficient.
    pub fn used_vars(&self) -> BTreeSet<&str> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| self.rows.iter().any(|r| !r.coef[*i].is_zero()))
            .map(|(_, v)| v.as_str())
            .collect()
    }
}

fn write_side<T: Exact>(f: &mut fmt::Formatter<'_>, coefs: &[T], names: &[String]) -> fmt::Result {
    let mut first = true;
    for (c, name) in coefs.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        match (first, c.is_negative()) {
            (true, true) => write!(f, "-")?,
            (true, false) => {}
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
        }
        if mag.is_one() {
            write!(f, "{name}")?;
        } else {
            write!(f, "{mag} {name}")?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl<T: Exact> fmt::Display for LinSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars: {}", self.vars.join(" "))?;
        writeln!(f, "nonneg: {}", self.consts.join(" "))?;
        for r in &self.rows {
            write_side(f, &r.coef, &self.vars)?;
            write!(f, " <= ")?;
            write_side(f, &r.bound, &self.consts)?;
            writeln!(f)?;
        }
        Ok(())
    }
}
