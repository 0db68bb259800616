//! Sampled equivalence of projected systems under random nonnegative constants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FmeError, LinSystem};
use crate::scalar::Exact;

/// Rate grid points per variable used by [`equivalent_sampled`].
pub const DEFAULT_RATE_GRID: usize = 20;

/// Upper limit on rate grid points per assignment.
pub const MAX_SAMPLE_POINTS: usize = 1_000_000;

/// Constants are drawn from `{0, 1/4, …, 12}`.
const CONST_QUARTERS: u32 = 48;

/// Membership agreement of `a` and `b` for `assignments` random constant vectors on a 20-point
/// rate grid per variable.
pub fn equivalent_sampled<T: Exact>(
    a: &LinSystem<T>,
    b: &LinSystem<T>,
    assignments: usize,
    seed: u64,
) -> Result<bool, FmeError> {
    equivalent_sampled_with(a, b, assignments, DEFAULT_RATE_GRID, seed)
}

/// Integer form `W · k ≤ rhs` of one row for grid indices `k`.
struct IntRow {
    w: Vec<i128>,
    rhs: i128,
}

fn to_i128(x: &BigInt) -> Result<i128, FmeError> {
    x.to_i128().ok_or(FmeError::Overflow)
}

/// Rows of `sys` as rational coefficients over the reference variable order.
type Rows = Vec<(Vec<BigRational>, Vec<BigRational>)>;

fn rational_rows(sys: &LinSystem<impl Exact>, order: &[usize]) -> Rows {
    sys.rows()
        .iter()
        .map(|r| (order.iter().map(|&i| r.coef[i].to_ratio()).collect(), r.bound.iter().map(|b| b.to_ratio()).collect()))
        .collect()
}

/// [`equivalent_sampled`] with an explicit grid size per variable.
pub fn equivalent_sampled_with<T: Exact>(
    a: &LinSystem<T>,
    b: &LinSystem<T>,
    assignments: usize,
    grid: usize,
    seed: u64,
) -> Result<bool, FmeError> {
    let mut left: Vec<String> = a.vars().to_vec();
    let mut right: Vec<String> = b.vars().to_vec();
    left.sort();
    right.sort();
    if left != right {
        return Err(FmeError::VariableMismatch { left: a.vars().to_vec(), right: b.vars().to_vec() });
    }
    let dim = a.vars().len();
    let grid = grid.max(2);
    if (grid as f64).powi(dim as i32) > MAX_SAMPLE_POINTS as f64 {
        return Err(FmeError::SampleGuard(grid.saturating_pow(dim as u32)));
    }
    let order_a: Vec<usize> = (0..dim).collect();
    let order_b: Vec<usize> = a.vars().iter().map(|v| b.var_index(v)).collect::<Result<_, _>>()?;
    let rows_a = rational_rows(a, &order_a);
    let rows_b = rational_rows(b, &order_b);
    let mut names: Vec<&String> = a.consts().iter().chain(b.consts()).collect();
    names.sort();
    names.dedup();
    let lookup = |sys: &LinSystem<T>| -> Vec<usize> {
        sys.consts().iter().map(|c| names.iter().position(|n| *n == c).unwrap_or(0)).collect()
    };
    let (map_a, map_b) = (lookup(a), lookup(b));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..assignments {
        let values: Vec<BigRational> = names
            .iter()
            .map(|_| {
                let q = if rng.random_bool(0.1) { 0 } else { rng.random_range(0..=CONST_QUARTERS) };
                BigRational::new(q.into(), 4.into())
            })
            .collect();
        let rhs = |rows: &[(Vec<BigRational>, Vec<BigRational>)], map: &[usize]| -> Vec<BigRational> {
            rows.iter()
                .map(|(_, bound)| bound.iter().zip(map).fold(BigRational::zero(), |s, (c, &j)| s + c * &values[j]))
                .collect()
        };
        let (rhs_a, rhs_b) = (rhs(&rows_a, &map_a), rhs(&rows_b, &map_b));
        let extents = axis_extents(dim, [(&rows_a, &rhs_a), (&rows_b, &rhs_b)], &values);
        let steps: Vec<BigRational> = extents.iter().map(|e| e / BigRational::from_integer((grid - 1).into())).collect();
        let int_a = integer_rows(&rows_a, &rhs_a, &steps)?;
        let int_b = integer_rows(&rows_b, &rhs_b, &steps)?;
        let mut k = vec![0i128; dim];
        loop {
            let inside = |rows: &[IntRow]| rows.iter().all(|r| r.w.iter().zip(&k).map(|(w, x)| w * x).sum::<i128>() <= r.rhs);
            if inside(&int_a) != inside(&int_b) {
                return Ok(false);
            }
            let mut pos = 0;
            loop {
                if pos == dim {
                    break;
                }
                k[pos] += 1;
                if (k[pos] as usize) < grid {
                    break;
                }
                k[pos] = 0;
                pos += 1;
            }
            if pos == dim {
                break;
            }
        }
    }
    Ok(true)
}

/// Per-variable grid extent: 5/4 of the largest single-variable cap implied by rows with
/// nonnegative coefficients, or the constant total when nothing caps the variable.
fn axis_extents(
    dim: usize,
    systems: [(&Rows, &Vec<BigRational>); 2],
    values: &[BigRational],
) -> Vec<BigRational> {
    let total = values.iter().fold(BigRational::one(), |s, v| s + v);
    (0..dim)
        .map(|i| {
            let mut widest: Option<BigRational> = None;
            for (rows, rhs) in systems {
                let cap = rows
                    .iter()
                    .zip(rhs.iter())
                    .filter(|((coef, _), _)| coef[i].is_positive() && coef.iter().all(|c| !c.is_negative()))
                    .map(|((coef, _), r)| r / &coef[i])
                    .min();
                let cap = cap.unwrap_or_else(|| total.clone());
                widest = Some(widest.map_or(cap.clone(), |w: BigRational| w.max(cap)));
            }
            let w = widest.unwrap_or_else(|| total.clone()) * BigRational::new(5.into(), 4.into());
            if w.is_positive() {
                w
            } else {
                BigRational::one()
            }
        })
        .collect()
}

fn integer_rows(
    rows: &[(Vec<BigRational>, Vec<BigRational>)],
    rhs: &[BigRational],
    steps: &[BigRational],
) -> Result<Vec<IntRow>, FmeError> {
    rows.iter()
        .zip(rhs)
        .map(|((coef, _), r)| {
            let w: Vec<BigRational> = coef.iter().zip(steps).map(|(c, s)| c * s).collect();
            let den = w.iter().chain([r]).fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            let scale = BigRational::from_integer(den);
            let int = |x: &BigRational| to_i128(&(x * &scale).to_integer());
            Ok(IntRow { w: w.iter().map(int).collect::<Result<_, _>>()?, rhs: int(r)? })
        })
        .collect()
}
