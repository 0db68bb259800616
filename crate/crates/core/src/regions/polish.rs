//! Trust-region polishing of max-min objectives over one- and two-dimensional parameter domains.
//!
//! Each objective is `min_j φ_j(u)` subject to `ψ_i(u) ≥ 0`, with `φ_j` and `ψ_i` smooth in the
//! parameters. Rows are linearized by finite differences and the resulting piecewise-linear
//! model is maximized exactly by enumerating vertices of its line arrangement.

use crate::scalar::Scalar;

/// Affine piece `a + g·d`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece<T> {
    pub a: T,
    pub g: [T; 2],
}

/// Linearized objective and side constraints around the current point.
#[derive(Debug, Default)]
pub(crate) struct Model<T> {
    pub objective: Vec<Piece<T>>,
    pub constraints: Vec<Piece<T>>,
}

impl<T: Scalar> Model<T> {
    fn value(&self, d: [T; 2]) -> T {
        self.objective.iter().fold(T::infinity(), |m, p| m.min(p.a + p.g[0] * d[0] + p.g[1] * d[1]))
    }

    fn feasible(&self, d: [T; 2], slack: T) -> bool {
        self.constraints.iter().all(|p| p.a + p.g[0] * d[0] + p.g[1] * d[1] >= -slack)
    }

    /// Step maximizing the model; `k` is 1 or 2.
    pub fn best_step(&self, k: usize) -> Option<[T; 2]> {
        let slack = T::epsilon() * T::of(256.0);
        let mut lines: Vec<Piece<T>> = self.constraints.clone();
        for (i, p) in self.objective.iter().enumerate() {
            for q in &self.objective[i + 1..] {
                lines.push(Piece { a: p.a - q.a, g: [p.g[0] - q.g[0], p.g[1] - q.g[1]] });
            }
        }
        let mut best: Option<([T; 2], T)> = None;
        let mut consider = |d: [T; 2]| {
            if d.iter().all(|x| x.is_finite()) && self.feasible(d, slack) {
                let v = self.value(d);
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((d, v));
                }
            }
        };
        consider([T::zero(), T::zero()]);
        if k == 1 {
            for l in &lines {
                if l.g[0] != T::zero() {
                    consider([-l.a / l.g[0], T::zero()]);
                }
            }
        } else {
            for (i, p) in lines.iter().enumerate() {
                for q in &lines[i + 1..] {
                    let det = p.g[0] * q.g[1] - p.g[1] * q.g[0];
                    let scale = (p.g[0].abs() + p.g[1].abs()) * (q.g[0].abs() + q.g[1].abs());
                    if det.abs() <= scale * T::of(1e-14) {
                        continue;
                    }
                    let x = (-p.a * q.g[1] + q.a * p.g[1]) / det;
                    let y = (-q.a * p.g[0] + p.a * q.g[0]) / det;
                    consider([x, y]);
                }
            }
        }
        best.map(|(d, _)| d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn narrow_ridge_is_followed() {
        let model = Model {
            objective: vec![Piece { a: -1e-4, g: [6.4, 0.0] }, Piece { a: -1e-4, g: [-2.8, 0.6] }],
            constraints: vec![
                Piece { a: 1e-3, g: [1.0, 0.0] },
                Piece { a: 1e-3, g: [-1.0, 0.0] },
                Piece { a: 1e-3, g: [0.0, 1.0] },
                Piece { a: 1e-3, g: [0.0, -1.0] },
            ],
        };
        let d = model.best_step(2).unwrap();
        assert!(model.value(d) > 0.0, "{d:?}");
        assert!(d[1] > 4.0 * d[0] && d[0] > 0.0);
    }

    #[test]
    fn one_dimensional_crease() {
        let model = Model {
            objective: vec![Piece { a: 0.0f64, g: [1.0, 0.0] }, Piece { a: 1.0, g: [-1.0, 0.0] }],
            constraints: vec![Piece { a: 2.0, g: [1.0, 0.0] }, Piece { a: 2.0, g: [-1.0, 0.0] }],
        };
        let d = model.best_step(1).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-12);
    }
}
