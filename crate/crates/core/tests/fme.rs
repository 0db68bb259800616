use num_rational::Rational64 as Q;
use proptest::prelude::*;
use sibc::fme::{equivalent_sampled, LinSystem, DERIVATIONS};
use sibc::{ExactSystem, Rational};

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn system(rows: &[([i64; 3], i64)]) -> LinSystem<Q> {
    let mut sys = LinSystem::new(vec!["x".into(), "y".into(), "z".into()], vec!["B".into()]).unwrap();
    for (coef, bound) in rows {
        sys.push(coef.iter().map(|&c| Q::from(c)).collect(), vec![Q::from(*bound)]).unwrap();
    }
    sys
}

fn holds(sys: &LinSystem<Q>, x: &[Q], b: Q) -> bool {
    sys.rows().iter().all(|r| r.coef.iter().zip(x).map(|(c, v)| c * v).sum::<Q>() <= r.bound[0] * b)
}

/// Whether some `z` completes `(x, y)`, by intersecting the interval each row allows.
fn z_exists(rows: &[([i64; 3], i64)], x: Q, y: Q, b: Q) -> bool {
    let (mut lo, mut hi): (Option<Q>, Option<Q>) = (None, None);
    for (c, bound) in rows {
        let rest = Q::from(*bound) * b - Q::from(c[0]) * x - Q::from(c[1]) * y;
        match c[2].signum() {
            1 => hi = Some(hi.map_or(rest / c[2], |h| h.min(rest / c[2]))),
            -1 => lo = Some(lo.map_or(rest / c[2], |l| l.max(rest / c[2]))),
            _ if rest < Q::from(0) => return false,
            _ => {}
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) => l <= h,
        _ => true,
    }
}

fn rows_strategy() -> impl Strategy<Value = Vec<([i64; 3], i64)>> {
    prop::collection::vec(([-2i64..=2, -2i64..=2, -2i64..=2], 0i64..=2), 1..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn elimination_is_the_exact_projection(rows in rows_strategy()) {
        let sys = system(&rows);
        let one = sys.eliminate("z").unwrap();
        let pruned = sys.eliminate_all(&["z"]).unwrap();
        prop_assert_eq!(one.vars(), ["x".to_string(), "y".to_string()]);
        for b in [q(0, 1), q(1, 1), q(3, 2)] {
            for i in -4..=4 {
                for j in -4..=4 {
                    let (x, y) = (q(i, 2), q(j, 2));
                    let want = z_exists(&rows, x, y, b);
                    prop_assert_eq!(holds(&one, &[x, y], b), want);
                    prop_assert_eq!(holds(&pruned, &[x, y], b), want);
                }
            }
        }
    }

    #[test]
    fn pruning_keeps_the_feasible_set(rows in rows_strategy()) {
        let sys = system(&rows);
        let pruned = sys.remove_redundant();
        prop_assert!(pruned.len() <= sys.len());
        for b in [q(0, 1), q(1, 1)] {
            for i in -2..=2 {
                for j in -2..=2 {
                    for k in -2..=2 {
                        let x = [q(i, 1), q(j, 1), q(k, 1)];
                        prop_assert_eq!(holds(&pruned, &x, b), holds(&sys, &x, b));
                    }
                }
            }
        }
    }
}

#[test]
fn elimination_order_does_not_matter() {
    for d in DERIVATIONS {
        let parsed = d.source::<Rational>().unwrap();
        let forward = parsed.system.eliminate_all(&parsed.eliminate).unwrap();
        let mut order = parsed.eliminate.clone();
        order.reverse();
        let backward = parsed.system.eliminate_all(&order).unwrap();
        assert!(equivalent_sampled(&forward, &backward, 40, 3).unwrap(), "{}", d.name);
    }
}

#[test]
fn shipped_derivations_hold_in_exact_and_machine_rationals() {
    for d in DERIVATIONS {
        let wide: ExactSystem = d.derive().unwrap();
        let narrow: LinSystem<Q> = d.derive().unwrap();
        assert!(equivalent_sampled(&wide, &d.expected::<Rational>().unwrap(), 100, 11).unwrap(), "{}", d.name);
        assert!(equivalent_sampled(&narrow, &d.expected::<Q>().unwrap(), 100, 11).unwrap(), "{}", d.name);
    }
}

#[test]
fn dropped_rows_of_irredundant_systems_are_detected() {
    for d in DERIVATIONS.iter().filter(|d| d.name != "g12_g21_split") {
        let expected = d.expected::<Rational>().unwrap();
        for skip in 0..expected.len() {
            let mut fewer = LinSystem::new(expected.vars().to_vec(), expected.consts().to_vec()).unwrap();
            for (i, r) in expected.rows().iter().enumerate() {
                if i != skip {
                    fewer.push(r.coef.clone(), r.bound.clone()).unwrap();
                }
            }
            assert!(!equivalent_sampled(&expected, &fewer, 100, 5).unwrap(), "{} row {skip}", d.name);
        }
    }
}
