//! Parameterized regions with a cached grid and local zoom refinement.

use std::fmt;
use std::sync::{Arc, OnceLock};

use super::polish::{Model, Piece};
use super::{Region, RegionError};
use crate::bounds::constraint::slack_of;
use crate::bounds::{Constraint, ConstraintSet};
use crate::scalar::Scalar;

/// Upper limit on the number of cached grid points of one region.
pub const MAX_GRID_POINTS: usize = 4_000_000;

/// Parameter domain of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// No free parameter.
    Fixed,
    /// Probability vectors with `parts` entries.
    Simplex(usize),
    /// The cube `[0, 1]^dims`.
    UnitBox(usize),
}

impl Domain {
    /// Number of free coordinates.
    pub fn free_dims(&self) -> usize {
        match *self {
            Domain::Fixed => 0,
            Domain::Simplex(parts) => parts.saturating_sub(1),
            Domain::UnitBox(dims) => dims,
        }
    }

    /// Number of grid points at `n` points per free coordinate.
    pub fn grid_size(&self, n: usize) -> usize {
        match *self {
            Domain::Fixed => 1,
            Domain::UnitBox(dims) => n.saturating_pow(dims as u32),
            Domain::Simplex(parts) => {
                let k = parts.saturating_sub(1);
                (1..=k).fold(1usize, |acc, i| acc.saturating_mul(n - 1 + i) / i)
            }
        }
    }

    /// Snaps `u` into the domain when it lies within rounding distance of it.
    fn snap<T: Scalar>(&self, u: &mut [T]) -> bool {
        let tol = T::epsilon() * T::of(64.0);
        for x in u.iter_mut() {
            if *x < -tol || *x > T::one() + tol {
                return false;
            }
            *x = x.max(T::zero()).min(T::one());
        }
        if let Domain::Simplex(_) = self {
            let sum = u.iter().fold(T::zero(), |s, &x| s + x);
            if sum > T::one() + tol {
                return false;
            }
        }
        true
    }

    fn params<T: Scalar>(&self, u: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend_from_slice(u);
        if let Domain::Simplex(parts) = *self {
            if parts > 0 {
                let rest = T::one() - u.iter().fold(T::zero(), |s, &x| s + x);
                out.push(rest.max(T::zero()));
            }
        }
    }
}

/// Grid resolution and refinement depth of the existential parameter search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Grid points per free parameter coordinate.
    pub grid: usize,
    /// Number of zoom levels, each halving the local lattice span.
    pub refine_levels: usize,
    /// Half-width of the local lattice in steps.
    pub lattice: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { grid: 512, refine_levels: 20, lattice: 2 }
    }
}

impl SearchConfig {
    /// Default search with a different grid resolution.
    pub fn with_grid(grid: usize) -> Self {
        SearchConfig { grid, ..Self::default() }
    }
}

type Generator<T> = dyn Fn(&[T]) -> ConstraintSet<T> + Send + Sync;

struct Grid<T> {
    k: usize,
    coords: Vec<T>,
    offsets: Vec<u32>,
    rows: Vec<Constraint<T>>,
}

impl<T: Scalar> Grid<T> {
    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    fn rows_of(&self, i: usize) -> &[Constraint<T>] {
        &self.rows[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    fn coords_of(&self, i: usize) -> &[T] {
        &self.coords[i * self.k..(i + 1) * self.k]
    }
}

/// Union over a parameter domain of the constraint sets produced by a generator.
pub struct ParamRegion<T: Scalar> {
    label: String,
    dim: usize,
    domain: Domain,
    search: SearchConfig,
    generator: Arc<Generator<T>>,
    grid: OnceLock<Grid<T>>,
}

impl<T: Scalar> fmt::Debug for ParamRegion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamRegion")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("search", &self.search)
            .finish()
    }
}

impl<T: Scalar> ParamRegion<T> {
    /// Builds a region; fails when the grid would exceed [`MAX_GRID_POINTS`].
    pub fn new<F>(
        label: impl Into<String>,
        dim: usize,
        domain: Domain,
        search: SearchConfig,
        generator: F,
    ) -> Result<Self, RegionError>
    where
        F: Fn(&[T]) -> ConstraintSet<T> + Send + Sync + 'static,
    {
        if search.grid < 2 {
            return Err(RegionError::ResourceGuard(format!("grid must have at least 2 points, got {}", search.grid)));
        }
        let points = domain.grid_size(search.grid);
        if points > MAX_GRID_POINTS {
            return Err(RegionError::ResourceGuard(format!(
                "parameter grid of {points} points exceeds the limit of {MAX_GRID_POINTS}"
            )));
        }
        Ok(ParamRegion {
            label: label.into(),
            dim,
            domain,
            search,
            generator: Arc::new(generator),
            grid: OnceLock::new(),
        })
    }

    /// Parameter domain.
    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Search configuration.
    pub fn search(&self) -> SearchConfig {
        self.search
    }

    /// Constraint set at concrete parameters.
    pub fn constraints_at(&self, params: &[T]) -> ConstraintSet<T> {
        (self.generator)(params)
    }

    /// Parameters attaining the best slack at `r`, with that slack.
    pub fn best_params(&self, r: &[T]) -> (T, Vec<T>) {
        let (s, u) = self.slack_search(r, None);
        let mut params = Vec::new();
        self.domain.params(&u, &mut params);
        (s, params)
    }

    fn grid(&self) -> &Grid<T> {
        self.grid.get_or_init(|| self.build_grid())
    }

    fn build_grid(&self) -> Grid<T> {
        let k = self.domain.free_dims();
        let n = self.search.grid;
        let step = T::one() / T::of((n - 1) as f64);
        let simplex = matches!(self.domain, Domain::Simplex(_));
        let mut grid = Grid { k, coords: Vec::new(), offsets: vec![0], rows: Vec::new() };
        let mut idx = vec![0usize; k];
        let mut u = vec![T::zero(); k];
        let mut params = Vec::new();
        loop {
            for (x, &i) in u.iter_mut().zip(&idx) {
                *x = T::of(i as f64) * step;
            }
            self.domain.params(&u, &mut params);
            grid.coords.extend_from_slice(&u);
            grid.rows.extend_from_slice((self.generator)(&params).rows());
            grid.offsets.push(grid.rows.len() as u32);
            let mut pos = 0;
            loop {
                if pos == k {
                    return grid;
                }
                idx[pos] += 1;
                let used: usize = idx.iter().sum();
                if idx[pos] < n && (!simplex || used < n) {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    fn optimize<F, R>(&self, score: F, row: R, stop: Option<T>) -> (T, Vec<T>)
    where
        F: Fn(&[Constraint<T>]) -> T,
        R: Fn(&Constraint<T>) -> RowValue<T>,
    {
        let grid = self.grid();
        let mut best = T::neg_infinity();
        let mut best_i = None;
        for i in 0..grid.len() {
            let s = score(grid.rows_of(i));
            if s > best {
                best = s;
                best_i = Some(i);
                if stop.is_some_and(|t| s >= t) {
                    return (s, grid.coords_of(i).to_vec());
                }
            }
        }
        let Some(best_i) = best_i else {
            return (best, grid.coords_of(0).to_vec());
        };
        self.refine(&score, &row, grid.coords_of(best_i).to_vec(), best, stop)
    }

    /// Local lattice zoom and polish from `center`, whose score is `best`.
    fn refine<F, R>(&self, score: &F, row: &R, mut center: Vec<T>, mut best: T, stop: Option<T>) -> (T, Vec<T>)
    where
        F: Fn(&[Constraint<T>]) -> T,
        R: Fn(&Constraint<T>) -> RowValue<T>,
    {
        let k = center.len();
        if k == 0 {
            return (best, center);
        }
        let m = self.search.lattice.max(1) as i64;
        let side = (2 * m + 1) as usize;
        let total = side.pow(k as u32);
        let mut h = T::one() / T::of((self.search.grid - 1) as f64);
        let mut cand = vec![T::zero(); k];
        let mut params = Vec::new();
        for _ in 0..self.search.refine_levels {
            let unit = h / T::of(m as f64);
            for _ in 0..MAX_MOVES_PER_LEVEL {
                let mut next = None;
                for code in 0..total {
                    let mut rem = code;
                    let mut zero = true;
                    for (c, &x) in cand.iter_mut().zip(&center) {
                        let off = (rem % side) as i64 - m;
                        rem /= side;
                        zero &= off == 0;
                        *c = x + T::of(off as f64) * unit;
                    }
                    if zero || !self.domain.snap(&mut cand) {
                        continue;
                    }
                    self.domain.params(&cand, &mut params);
                    let s = score((self.generator)(&params).rows());
                    if s > best {
                        best = s;
                        next = Some(cand.clone());
                        if stop.is_some_and(|t| s >= t) {
                            return (s, cand);
                        }
                    }
                }
                match next {
                    Some(c) => center = c,
                    None => break,
                }
            }
            h = h / T::of(2.0);
        }
        if best > T::neg_infinity() && k <= 2 {
            self.polish(score, row, &mut center, &mut best, stop);
        }
        (best, center)
    }

    fn rows_at(&self, u: &[T], params: &mut Vec<T>) -> Vec<Constraint<T>> {
        self.domain.params(u, params);
        (self.generator)(params).rows().to_vec()
    }

    fn polish<F, R>(&self, score: &F, row: &R, center: &mut Vec<T>, best: &mut T, stop: Option<T>)
    where
        F: Fn(&[Constraint<T>]) -> T,
        R: Fn(&Constraint<T>) -> RowValue<T>,
    {
        let k = center.len();
        let eps = T::of(FD_STEP);
        let mut trust = T::one() / T::of((self.search.grid - 1) as f64);
        let mut params = Vec::new();
        let mut model = Model::default();
        for _ in 0..POLISH_ITERS {
            if stop.is_some_and(|t| *best >= t) || trust < T::of(1e-15) {
                return;
            }
            let base = self.rows_at(center, &mut params);
            let mut shifted = Vec::with_capacity(k);
            for i in 0..k {
                let mut u = center.clone();
                u[i] = u[i] + eps;
                let mut step = eps;
                if !self.domain.snap(&mut u) || u[i] == center[i] {
                    u[i] = center[i] - eps;
                    step = -eps;
                    if !self.domain.snap(&mut u) {
                        return;
                    }
                }
                let rows = self.rows_at(&u, &mut params);
                if rows.len() != base.len() || rows.iter().zip(&base).any(|(a, b)| a.mask != b.mask) {
                    return;
                }
                shifted.push((rows, step));
            }
            model.objective.clear();
            model.constraints.clear();
            for (j, c) in base.iter().enumerate() {
                let RowValue::Objective(v) = row(c) else { continue };
                let mut g = [T::zero(); 2];
                for (i, (rows, step)) in shifted.iter().enumerate() {
                    let w = match row(&rows[j]) {
                        RowValue::Objective(w) => w,
                        RowValue::Ignore => v,
                    };
                    g[i] = (w - v) / *step;
                }
                if !v.is_finite() || g.iter().any(|x| !x.is_finite()) {
                    return;
                }
                model.objective.push(Piece { a: v, g });
            }
            if model.objective.is_empty() {
                return;
            }
            let mut sum = T::zero();
            for i in 0..k {
                let mut e = [T::zero(); 2];
                e[i] = T::one();
                let n = [-e[0], -e[1]];
                sum = sum + center[i];
                model.constraints.push(Piece { a: center[i], g: e });
                model.constraints.push(Piece { a: T::one() - center[i], g: n });
                model.constraints.push(Piece { a: trust, g: e });
                model.constraints.push(Piece { a: trust, g: n });
            }
            if let Domain::Simplex(_) = self.domain {
                let mut g = [T::zero(); 2];
                g[..k].fill(-T::one());
                model.constraints.push(Piece { a: T::one() - sum, g });
            }
            let Some(d) = model.best_step(k) else { return };
            if d[..k].iter().all(|x| x.is_zero()) {
                return;
            }
            let mut cand: Vec<T> = center.iter().zip(&d).map(|(&x, &s)| x + s).collect();
            if self.domain.snap(&mut cand) {
                let s = score(&self.rows_at(&cand, &mut params));
                if s > *best {
                    *best = s;
                    *center = cand;
                    continue;
                }
            }
            trust = trust / T::of(4.0);
        }
    }

    fn slack_search(&self, r: &[T], stop: Option<T>) -> (T, Vec<T>) {
        match mask_sums(r) {
            Some(t) => self.optimize(
                |rows| rows.iter().fold(T::infinity(), |s, c| s.min(c.bound - t[c.mask as usize])),
                |c| RowValue::Objective(c.bound - t[c.mask as usize]),
                stop,
            ),
            None => self.optimize(|rows| slack_of(rows, r), |c| RowValue::Objective(c.bound - c.lhs(r)), stop),
        }
    }

    fn slack_until(&self, r: &[T], stop: Option<T>) -> T {
        self.slack_search(r, stop).0
    }
}

/// Contribution of one constraint row to a max-min objective.
enum RowValue<T> {
    Objective(T),
    Ignore,
}

/// Local lattice moves allowed before the step is halved.
const MAX_MOVES_PER_LEVEL: usize = 16;

/// Iteration cap of the trust-region polish.
const POLISH_ITERS: usize = 80;

/// Scale of the rows not involving the response axis in [`Region::max_response`].
const FEASIBILITY_WEIGHT: f64 = 1e6;

/// Slack-ascent steps refining a directly maximized response.
const RESPONSE_STEPS: usize = 12;

/// Slack below which the response refinement stops.
const RESPONSE_TOL: f64 = 1e-12;

/// Finite-difference step of the polish linearization.
const FD_STEP: f64 = 1e-7;

/// Sums `Σ_{i ∈ m} v_i` for every mask `m`; `v` has at most 16 entries.
fn mask_sums<T: Scalar>(v: &[T]) -> Option<Vec<T>> {
    if v.len() > 16 {
        return None;
    }
    let mut t = vec![T::zero(); 1 << v.len()];
    for m in 1..t.len() {
        t[m] = t[m & (m - 1)] + v[m.trailing_zeros() as usize];
    }
    Some(t)
}

impl<T: Scalar> Region<T> for ParamRegion<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn best_slack(&self, r: &[T]) -> T {
        self.slack_until(r, None)
    }

    fn slack_until(&self, r: &[T], stop: T) -> T {
        ParamRegion::slack_until(self, r, Some(stop))
    }

    fn radial(&self, d: &[T]) -> T {
        let table = mask_sums(d);
        let w = |c: &Constraint<T>| table.as_ref().map_or_else(|| c.lhs(d), |t| t[c.mask as usize]);
        let best = self.optimize(
            |rows| {
                rows.iter().fold(T::infinity(), |t, c| {
                    let x = w(c);
                    if x > T::zero() {
                        t.min(c.bound.max(T::zero()) / x)
                    } else {
                        t
                    }
                })
            },
            |c| {
                let x = w(c);
                if x > T::zero() {
                    RowValue::Objective(c.bound / x)
                } else {
                    RowValue::Ignore
                }
            },
            None,
        );
        best.0.max(T::zero())
    }

    fn max_response(&self, r: &[T], axis: usize) -> Option<T> {
        let feas = T::of(1e-12);
        let weight = T::of(FEASIBILITY_WEIGHT);
        let mut base = r.to_vec();
        base[axis] = T::zero();
        let bit = 1u32 << axis;
        let table = mask_sums(&base);
        let lhs = |c: &Constraint<T>| table.as_ref().map_or_else(|| c.lhs(&base), |t| t[c.mask as usize]);
        let room = |c: &Constraint<T>| {
            let v = c.bound - lhs(c);
            if c.mask & bit == 0 {
                weight * (v + feas)
            } else {
                v
            }
        };
        let (best, center) = self.optimize(
            |rows| rows.iter().fold(T::infinity(), |m, c| m.min(room(c))),
            |c| RowValue::Objective(room(c)),
            None,
        );
        if !(best >= -feas) {
            return None;
        }
        let mut params = Vec::new();
        let rows = self.rows_at(&center, &mut params);
        let mut v = rows.iter().filter(|c| c.mask & bit != 0).fold(T::infinity(), |m, c| m.min(c.bound - lhs(c)));
        v = v.max(best).max(T::zero());
        if !v.is_finite() {
            return Some(v);
        }
        let mut probe = r.to_vec();
        let mut center = center;
        for _ in 0..RESPONSE_STEPS {
            probe[axis] = v;
            let Some(t) = mask_sums(&probe) else { break };
            let score = |rows: &[Constraint<T>]| rows.iter().fold(T::infinity(), |s, c| s.min(c.bound - t[c.mask as usize]));
            let start = score(&self.rows_at(&center, &mut params));
            let (s, c) =
                self.refine(&score, &|c: &Constraint<T>| RowValue::Objective(c.bound - t[c.mask as usize]), center, start, None);
            if !(s > T::of(RESPONSE_TOL)) {
                break;
            }
            v = v + s;
            center = c;
        }
        Some(v)
    }
}

/// Intersection of regions of equal dimension.
pub struct Intersection<T: Scalar> {
    label: String,
    parts: Vec<Arc<dyn Region<T>>>,
}

impl<T: Scalar> Intersection<T> {
    /// Intersection of `parts`; all must share one dimension.
    pub fn new(label: impl Into<String>, parts: Vec<Arc<dyn Region<T>>>) -> Result<Self, RegionError> {
        let dim = parts.first().map_or(0, |p| p.dim());
        if let Some(p) = parts.iter().find(|p| p.dim() != dim) {
            return Err(RegionError::DimensionMismatch { expected: dim, got: p.dim() });
        }
        if parts.is_empty() {
            return Err(RegionError::InvalidSlice("intersection of no regions".into()));
        }
        Ok(Intersection { label: label.into(), parts })
    }

    /// Component regions.
    pub fn parts(&self) -> &[Arc<dyn Region<T>>] {
        &self.parts
    }
}

impl<T: Scalar> Region<T> for Intersection<T> {
    fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn best_slack(&self, r: &[T]) -> T {
        self.parts.iter().fold(T::infinity(), |s, p| s.min(p.best_slack(r)))
    }

    fn slack_until(&self, r: &[T], stop: T) -> T {
        let mut worst = T::infinity();
        for p in &self.parts {
            worst = worst.min(p.slack_until(r, stop));
            if worst < stop {
                break;
            }
        }
        worst
    }

    fn radial(&self, d: &[T]) -> T {
        self.parts.iter().fold(T::infinity(), |t, p| t.min(p.radial(d)))
    }

    fn max_response(&self, r: &[T], axis: usize) -> Option<T> {
        self.parts.iter().try_fold(T::infinity(), |t, p| p.max_response(r, axis).map(|v| t.min(v)))
    }
}
