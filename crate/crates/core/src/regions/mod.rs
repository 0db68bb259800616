//! Rate regions defined as unions of constraint sets over a power-split domain, and the
//! numerical queries built on them.

mod catalog;
mod ops;
mod param;
mod polish;

pub use catalog::{
    bestknown_inner_region, bestknown_outer_region, build_region, capacity_region, fourrx_region,
    group4_inner_region, group4_outer_region, group7_inner_region, group7_outer_region, groups56_outer_region,
    joint_inner_region, BoundSelector,
};
pub use ops::{
    boundary_samples, contains, contains_points, hausdorff_gap, sig9, slice2d, slice2d_bisect, slice_gaps, BoundarySlice, Containment,
    SliceSpec, BISECTION_TOL, SAMPLE_SCALES,
};
pub use param::{Domain, Intersection, ParamRegion, SearchConfig, MAX_GRID_POINTS};

use thiserror::Error;

use crate::bounds::BoundsError;
use crate::graphs::GroupMember;
use crate::scalar::Scalar;

/// Default membership tolerance on constraint slack.
pub const MEMBER_TOL: f64 = 1e-9;

/// Errors raised by region queries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("rate vector has {got} entries, region has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rates must be nonnegative, got {0}")]
    NegativeRate(f64),
    #[error("bound `{selector}` is not defined for {target}")]
    InvalidSelector { selector: BoundSelector, target: String },
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("invalid slice: {0}")]
    InvalidSlice(String),
    #[error("both slices are empty")]
    EmptySlices,
}

impl RegionError {
    pub(crate) fn invalid(selector: BoundSelector, gm: GroupMember) -> Self {
        RegionError::InvalidSelector { selector, target: gm.to_string() }
    }
}

/// Downward-closed rate region supporting existential membership queries.
///
/// Every query maximizes over the region's parameter domain, so each method reports the best
/// value attained by the search.
pub trait Region<T: Scalar>: Send + Sync {
    /// Number of rates.
    fn dim(&self) -> usize;

    /// Human-readable description.
    fn label(&self) -> &str;

    /// Largest minimum slack `bound − lhs(r)` over the parameter domain.
    fn best_slack(&self, r: &[T]) -> T;

    /// Best slack found by a search that may stop once it reaches `stop`.
    ///
    /// A result below `stop` equals [`Region::best_slack`].
    fn slack_until(&self, r: &[T], stop: T) -> T {
        let _ = stop;
        self.best_slack(r)
    }

    /// Membership without input validation.
    fn contains_point(&self, r: &[T], tol: T) -> bool {
        self.slack_until(r, -tol) >= -tol
    }

    /// Largest `t ≥ 0` with `t·d` in the region.
    fn radial(&self, d: &[T]) -> T;

    /// Largest rate on `axis` given the other coordinates of `r`; `None` when they are infeasible.
    fn max_response(&self, r: &[T], axis: usize) -> Option<T>;

    /// Validated membership with slack tolerance `tol`.
    fn member(&self, r: &[T], tol: T) -> Result<bool, RegionError> {
        check_point(self.dim(), r)?;
        Ok(self.contains_point(r, tol))
    }
}

pub(crate) fn check_point<T: Scalar>(dim: usize, r: &[T]) -> Result<(), RegionError> {
    if r.len() != dim {
        return Err(RegionError::DimensionMismatch { expected: dim, got: r.len() });
    }
    if let Some(x) = r.iter().find(|x| !(**x >= T::zero())) {
        return Err(RegionError::NegativeRate(x.as_f64()));
    }
    Ok(())
}
