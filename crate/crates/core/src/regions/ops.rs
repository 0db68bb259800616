//! Slices, containment and gap metrics over [`Region`]s.

use serde::Serialize;

use super::{Region, RegionError};
use crate::scalar::Scalar;

/// Rate resolution of [`slice2d_bisect`].
pub const BISECTION_TOL: f64 = 1e-6;

/// Scale factors applied to boundary points when sampling for containment.
pub const SAMPLE_SCALES: [f64; 4] = [0.5, 0.9, 0.99, 1.0];

/// Two-dimensional cross-section request.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec<T> {
    /// Fixed coordinates `(axis, value)`; unlisted axes other than sweep and response are 0.
    pub fixed: Vec<(usize, T)>,
    pub sweep: usize,
    pub response: usize,
    /// Number of sweep values.
    pub grid: usize,
    /// Sweep interval; defaults to `[0, extent]` of the region(s) along the sweep axis.
    pub sweep_range: Option<(T, T)>,
}

impl<T: Scalar> SliceSpec<T> {
    /// Slice at `fixed_axis = value`, sweeping `sweep` and reporting `response`.
    pub fn new(fixed: Vec<(usize, T)>, sweep: usize, response: usize, grid: usize) -> Self {
        SliceSpec { fixed, sweep, response, grid, sweep_range: None }
    }

    fn validate(&self, dim: usize) -> Result<(), RegionError> {
        let bad = |m: String| Err(RegionError::InvalidSlice(m));
        if self.sweep >= dim || self.response >= dim {
            return bad(format!("axes must be below {dim}"));
        }
        if self.sweep == self.response {
            return bad("sweep and response axes coincide".into());
        }
        if self.grid < 2 {
            return bad("slice grid needs at least 2 points".into());
        }
        for &(axis, value) in &self.fixed {
            if axis >= dim || axis == self.sweep || axis == self.response {
                return bad(format!("fixed axis {axis} is invalid"));
            }
            if !(value >= T::zero()) {
                return bad(format!("fixed value {value} is negative"));
            }
        }
        if let Some((lo, hi)) = self.sweep_range {
            if !(lo >= T::zero() && hi >= lo) {
                return bad(format!("sweep range [{lo}, {hi}] is invalid"));
            }
        }
        Ok(())
    }

    fn base(&self, dim: usize) -> Vec<T> {
        let mut r = vec![T::zero(); dim];
        for &(axis, value) in &self.fixed {
            r[axis] = value;
        }
        r
    }

    fn sweeps(&self, hi: T, lo: T) -> Vec<T> {
        let n = self.grid - 1;
        (0..=n).map(|k| lo + (hi - lo) * T::of(k as f64) / T::of(n as f64)).collect()
    }
}

/// Boundary of a region along a 2-D cross-section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySlice<T> {
    pub fixed: Vec<(usize, T)>,
    pub sweep_axis: usize,
    pub response_axis: usize,
    /// `(sweep value, largest response)` pairs, response non-increasing.
    pub samples: Vec<(T, T)>,
}

impl<T: Scalar> BoundarySlice<T> {
    /// CSV with header `sweep,response` and 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sweep,response\n");
        for &(s, r) in &self.samples {
            out.push_str(&format!("{},{}\n", sig9(s.as_f64()), sig9(r.as_f64())));
        }
        out
    }
}

/// Formats `x` with 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&e) {
        format!("{x:.8e}")
    } else {
        format!("{:.*}", (8 - e).max(0) as usize, x)
    }
}

fn trace<T: Scalar>(region: &dyn Region<T>, spec: &SliceSpec<T>, sweeps: &[T]) -> Vec<Option<T>> {
    let mut r = spec.base(region.dim());
    let mut floor = T::infinity();
    sweeps
        .iter()
        .map(|&s| {
            r[spec.sweep] = s;
            region.max_response(&r, spec.response).map(|v| {
                floor = floor.min(v);
                floor
            })
        })
        .collect()
}

fn extent<T: Scalar>(region: &dyn Region<T>, spec: &SliceSpec<T>) -> Option<T> {
    region.max_response(&spec.base(region.dim()), spec.sweep)
}

/// Largest response rate along each sweep value, by direct maximization over the parameter domain.
///
/// An empty slice is returned when the fixed coordinates lie outside the region.
pub fn slice2d<T: Scalar>(region: &dyn Region<T>, spec: &SliceSpec<T>) -> Result<BoundarySlice<T>, RegionError> {
    spec.validate(region.dim())?;
    let (lo, hi) = match spec.sweep_range {
        Some(range) => range,
        None => match extent(region, spec) {
            Some(e) => (T::zero(), e),
            None => return Ok(empty(spec)),
        },
    };
    let sweeps = spec.sweeps(hi, lo);
    let samples = sweeps.iter().zip(trace(region, spec, &sweeps)).filter_map(|(&s, v)| v.map(|v| (s, v))).collect();
    Ok(BoundarySlice { samples, ..empty(spec) })
}

/// Same slice as [`slice2d`], located by bisection on membership to [`BISECTION_TOL`].
pub fn slice2d_bisect<T: Scalar>(
    region: &dyn Region<T>,
    spec: &SliceSpec<T>,
    tol: T,
) -> Result<BoundarySlice<T>, RegionError> {
    spec.validate(region.dim())?;
    let (lo, hi) = match spec.sweep_range {
        Some(range) => range,
        None => {
            let mut probe = spec.base(region.dim());
            match bisect_max(|x| {
                probe[spec.sweep] = x;
                region.contains_point(&probe, tol)
            }) {
                Some(e) => (T::zero(), e),
                None => return Ok(empty(spec)),
            }
        }
    };
    let mut r = spec.base(region.dim());
    let mut samples = Vec::new();
    let mut floor = T::infinity();
    for s in spec.sweeps(hi, lo) {
        r[spec.sweep] = s;
        let mut probe = r.clone();
        if let Some(v) = bisect_max(|x| {
            probe[spec.response] = x;
            region.contains_point(&probe, tol)
        }) {
            floor = floor.min(v);
            samples.push((s, floor));
        }
    }
    Ok(BoundarySlice { samples, ..empty(spec) })
}

fn bisect_max<T: Scalar>(mut inside: impl FnMut(T) -> bool) -> Option<T> {
    if !inside(T::zero()) {
        return None;
    }
    let mut hi = T::one();
    while inside(hi) {
        hi = hi * T::of(2.0);
        if hi > T::of(1e6) {
            return Some(hi);
        }
    }
    let mut lo = T::zero();
    while hi - lo > T::of(BISECTION_TOL) / T::of(4.0) {
        let mid = (lo + hi) / T::of(2.0);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn empty<T: Scalar>(spec: &SliceSpec<T>) -> BoundarySlice<T> {
    BoundarySlice { fixed: spec.fixed.clone(), sweep_axis: spec.sweep, response_axis: spec.response, samples: vec![] }
}

/// Absolute boundary difference of two regions at each shared sweep value.
///
/// A sweep value infeasible for one region counts that region's boundary as 0.
pub fn slice_gaps<T: Scalar>(
    a: &dyn Region<T>,
    b: &dyn Region<T>,
    spec: &SliceSpec<T>,
) -> Result<Vec<(T, T)>, RegionError> {
    check_dims(a, b)?;
    spec.validate(a.dim())?;
    let (lo, hi) = match spec.sweep_range {
        Some(range) => range,
        None => match (extent(a, spec), extent(b, spec)) {
            (None, None) => return Err(RegionError::EmptySlices),
            (x, y) => (T::zero(), x.unwrap_or(T::zero()).max(y.unwrap_or(T::zero()))),
        },
    };
    let sweeps = spec.sweeps(hi, lo);
    let (ta, tb) = (trace(a, spec, &sweeps), trace(b, spec, &sweeps));
    if ta.iter().chain(&tb).all(Option::is_none) {
        return Err(RegionError::EmptySlices);
    }
    Ok(sweeps
        .into_iter()
        .zip(ta.into_iter().zip(tb))
        .map(|(s, (x, y))| (s, (x.unwrap_or(T::zero()) - y.unwrap_or(T::zero())).abs()))
        .collect())
}

/// Largest boundary difference over a slice.
pub fn hausdorff_gap<T: Scalar>(a: &dyn Region<T>, b: &dyn Region<T>, spec: &SliceSpec<T>) -> Result<T, RegionError> {
    Ok(slice_gaps(a, b, spec)?.into_iter().fold(T::zero(), |m, (_, g)| m.max(g)))
}

fn check_dims<T: Scalar>(a: &dyn Region<T>, b: &dyn Region<T>) -> Result<(), RegionError> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(RegionError::DimensionMismatch { expected: a.dim(), got: b.dim() })
    }
}

/// Outcome of a sampled containment check `b ⊆ a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Containment<T> {
    pub holds: bool,
    /// Sample point of `b` outside `a` with the largest violation.
    pub witness: Option<Vec<T>>,
    /// Constraint violation of `a` at the witness (0 when none).
    pub violation: T,
    /// Number of sample points checked.
    pub checked: usize,
}

/// Boundary points of `region` scaled by [`SAMPLE_SCALES`]; at least `count` points when `region` is bounded.
pub fn boundary_samples<T: Scalar>(region: &dyn Region<T>, count: usize) -> Vec<Vec<T>> {
    let dim = region.dim();
    let base = count.div_ceil(SAMPLE_SCALES.len()).max(1);
    let mut points = Vec::with_capacity(base);
    let radial_points = |want: usize, points: &mut Vec<Vec<T>>| {
        for d in direction_lattice(dim, want) {
            let t = region.radial(&d);
            if t.is_finite() {
                points.push(d.iter().map(|&x| x * t).collect::<Vec<T>>());
            }
        }
    };
    radial_points(base / 2, &mut points);
    let pairs: Vec<(usize, usize)> =
        (0..dim).flat_map(|s| (0..dim).filter(move |&q| q != s).map(move |q| (s, q))).collect();
    let fractions = [0.0, 0.5];
    let per_slice = (base.saturating_sub(points.len()) / (pairs.len() * fractions.len())).max(2);
    let extents: Vec<T> = (0..dim).map(|i| region.radial(&unit(dim, i))).collect();
    for &(sweep, response) in &pairs {
        for f in fractions {
            let fixed: Vec<(usize, T)> =
                (0..dim).filter(|&i| i != sweep && i != response).map(|i| (i, extents[i] * T::of(f))).collect();
            let spec = SliceSpec::new(fixed.clone(), sweep, response, per_slice);
            if let Ok(slice) = slice2d(region, &spec) {
                for (s, v) in slice.samples {
                    let mut r = spec.base(dim);
                    r[sweep] = s;
                    r[response] = v;
                    points.push(r);
                }
            }
        }
    }
    if points.len() < base {
        radial_points(base - points.len() + base / 2 + 1, &mut points);
    }
    points
        .iter()
        .flat_map(|p| SAMPLE_SCALES.iter().map(move |&c| p.iter().map(|&x| x * T::of(c)).collect()))
        .collect()
}

/// Sampled check that `b ⊆ a`, drawing boundary-biased points of `b`.
pub fn contains<T: Scalar>(a: &dyn Region<T>, b: &dyn Region<T>, samples: usize, tol: T) -> Containment<T> {
    if a.dim() != b.dim() {
        return Containment { holds: false, witness: None, violation: T::zero(), checked: 0 };
    }
    contains_points(a, b, &boundary_samples(b, samples), tol)
}

/// Containment check of `b ⊆ a` at precomputed points of `b`, such as [`boundary_samples`] output.
pub fn contains_points<T: Scalar>(a: &dyn Region<T>, b: &dyn Region<T>, points: &[Vec<T>], tol: T) -> Containment<T> {
    let mut out = Containment { holds: true, witness: None, violation: T::zero(), checked: 0 };
    if a.dim() != b.dim() {
        out.holds = false;
        return out;
    }
    for x in points {
        out.checked += 1;
        let slack = a.slack_until(x, -tol);
        if slack >= -tol || !b.contains_point(x, tol) {
            continue;
        }
        let v = -slack;
        out.holds = false;
        if v > out.violation || out.witness.is_none() {
            out.violation = v;
            out.witness = Some(x.clone());
        }
    }
    out
}

fn unit<T: Scalar>(dim: usize, i: usize) -> Vec<T> {
    let mut d = vec![T::zero(); dim];
    d[i] = T::one();
    d
}

/// Nonnegative integer compositions of a level `L` into `dim` parts, scaled by `1/L`, with at
/// least `want` members.
fn direction_lattice<T: Scalar>(dim: usize, want: usize) -> Vec<Vec<T>> {
    let count = |l: usize| (1..dim).fold(1usize, |acc, i| acc * (l + i) / i);
    let mut level = 1;
    while count(level) < want {
        level += 1;
    }
    let mut out = Vec::new();
    let mut parts = vec![0usize; dim];
    compose(level, 0, &mut parts, &mut |p| {
        out.push(p.iter().map(|&x| T::of(x as f64 / level as f64)).collect());
    });
    out
}

fn compose(left: usize, pos: usize, parts: &mut [usize], emit: &mut dyn FnMut(&[usize])) {
    if pos + 1 == parts.len() {
        parts[pos] = left;
        emit(parts);
        return;
    }
    for x in 0..=left {
        parts[pos] = x;
        compose(left - x, pos + 1, parts, emit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(0.5), "0.500000000");
        assert_eq!(sig9(1.0), "1.00000000");
        assert_eq!(sig9(0.792481250360578), "0.792481250");
        assert_eq!(sig9(12.5), "12.5000000");
    }

    #[test]
    fn lattice_covers_faces() {
        let d: Vec<Vec<f64>> = direction_lattice(3, 10);
        assert_eq!(d.len(), 10);
        assert!(d.contains(&vec![1.0, 0.0, 0.0]));
        assert!(d.iter().all(|v| (v.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }
}
