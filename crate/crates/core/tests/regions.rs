use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use sibc::bounds::{capacity_constraints, group4_inner, ChannelParams, ConstraintSet, PowerSplit};
use sibc::graphs::{recompose, GroupMember, SideInfoGraph};
use sibc::regions::{
    bestknown_outer_region, capacity_region, contains, group4_inner_region, hausdorff_gap, slice2d, slice2d_bisect,
    Region, SearchConfig, SliceSpec,
};

fn channel(power: f64, noise: [f64; 3]) -> ChannelParams<f64> {
    ChannelParams::new(power, noise.to_vec()).unwrap()
}

fn graph(group: u8, member: u8) -> (GroupMember, SideInfoGraph) {
    let gm = GroupMember::new(group, member).unwrap();
    (gm, recompose(gm).unwrap())
}

/// Largest response over an explicit parameter grid, each set evaluated on its own.
fn grid_oracle(params: &[Vec<f64>], sets: &dyn Fn(&[f64]) -> ConstraintSet<f64>, r: &[f64], axis: usize) -> Option<f64> {
    params.iter().filter_map(|a| sets(a).max_response(r, axis, 1e-12)).reduce(f64::max)
}

/// Grid oracle over the unit square, rerun on a fine grid around the best coarse cell.
fn square_oracle(n: usize, sets: &dyn Fn(&[f64]) -> ConstraintSet<f64>, r: &[f64], axis: usize) -> Option<f64> {
    let h = 1.0 / n as f64;
    let coarse: Vec<Vec<f64>> =
        (0..=n).flat_map(|i| (0..=n).map(move |j| vec![i as f64 * h, j as f64 * h])).collect();
    let best = coarse
        .iter()
        .filter_map(|a| sets(a).max_response(r, axis, 1e-12).map(|v| (v, a)))
        .max_by(|x, y| x.0.total_cmp(&y.0))?;
    let (fine, lo) = (n, |c: f64| (c - 2.0 * h).max(0.0));
    let (x0, y0) = (lo(best.1[0]), lo(best.1[1]));
    let step = 4.0 * h / fine as f64;
    let zoom: Vec<Vec<f64>> = (0..=fine)
        .flat_map(|i| (0..=fine).map(move |j| vec![(x0 + i as f64 * step).min(1.0), (y0 + j as f64 * step).min(1.0)]))
        .collect();
    grid_oracle(&zoom, sets, r, axis).map(|v| v.max(best.0))
}

fn simplex(k: usize, steps: usize) -> Vec<Vec<f64>> {
    let h = 1.0 / steps as f64;
    match k {
        2 => (0..=steps).map(|i| vec![i as f64 * h, 1.0 - i as f64 * h]).collect(),
        3 => (0..=steps)
            .flat_map(|i| (0..=steps - i).map(move |j| vec![i as f64 * h, j as f64 * h, (steps - i - j) as f64 * h]))
            .collect(),
        _ => unreachable!(),
    }
}

fn check_slice(region: &dyn Region<f64>, oracle: &dyn Fn(&[f64]) -> Option<f64>, spec: &SliceSpec<f64>) {
    let direct = slice2d(region, spec).unwrap();
    let bisect = slice2d_bisect(region, spec, 1e-9).unwrap();
    assert_eq!(direct.samples.len(), spec.grid);
    assert_eq!(bisect.samples.len(), spec.grid);
    let mut r = vec![0.0; 3];
    for &(axis, v) in &spec.fixed {
        r[axis] = v;
    }
    for ((s, v), (_, w)) in direct.samples.iter().zip(&bisect.samples) {
        r[spec.sweep] = *s;
        let oracle = oracle(&r).unwrap();
        assert!((v - oracle).abs() <= 5e-4, "{}: sweep {s}: {v} vs oracle {oracle}", region.label());
        assert!(*v >= oracle - 1e-9, "{}: sweep {s}: {v} below attained {oracle}", region.label());
        assert!((v - w).abs() <= 5e-4, "{}: sweep {s}: {v} vs bisection {w}", region.label());
    }
}

#[test]
fn slices_match_brute_force_grids() {
    let p = channel(10.0, [1.0, 2.0, 4.0]);
    let s = SearchConfig::default();

    let (gm, g) = graph(1, 1);
    let sets = |a: &[f64]| capacity_constraints(gm, &g, &p, &PowerSplit::new(a.to_vec())).unwrap();
    let mut spec = SliceSpec::new(vec![(0, 0.5)], 1, 2, 5);
    spec.sweep_range = Some((0.0, 0.7));
    let params = simplex(3, 4000);
    check_slice(capacity_region(&g, &p, s).unwrap().as_ref(), &|r| grid_oracle(&params, &sets, r, 2), &spec);

    let (gm, g) = graph(5, 1);
    let sets = |a: &[f64]| capacity_constraints(gm, &g, &p, &PowerSplit::new(a.to_vec())).unwrap();
    let mut spec = SliceSpec::new(vec![(1, 0.5)], 2, 0, 8);
    spec.sweep_range = Some((0.0, 0.6));
    let params = simplex(2, 20_000);
    check_slice(capacity_region(&g, &p, s).unwrap().as_ref(), &|r| grid_oracle(&params, &sets, r, 0), &spec);

    let (gm, g) = graph(4, 1);
    let sets = |x: &[f64]| group4_inner(gm, &g, &p, x[0], x[1]).unwrap();
    let mut spec = SliceSpec::new(vec![(0, 0.3 * p.single_user(1))], 2, 1, 8);
    spec.sweep_range = Some((0.0, p.single_user(3)));
    check_slice(&group4_inner_region(&g, &p, s).unwrap(), &|r| square_oracle(300, &sets, r, 1), &spec);
}

#[test]
fn equal_noise_group_1_slice_is_a_line() {
    let p = channel(1.0, [1.0, 1.0, 1.0]);
    let (_, g) = graph(1, 1);
    let region = capacity_region(&g, &p, SearchConfig::default()).unwrap();
    let slice = slice2d(region.as_ref(), &SliceSpec::new(vec![(0, 0.0)], 1, 2, 11)).unwrap();
    assert_eq!(slice.samples.len(), 11);
    for (s, v) in slice.samples {
        assert!((s + v - 0.5).abs() < 1e-6, "{s} + {v}");
    }
    assert!(region.member(&[0.2, 0.2, 0.05], 1e-9).unwrap());
}

#[test]
fn region_gap_to_itself_is_zero() {
    let p = channel(10.0, [1.0, 2.0, 4.0]);
    let (_, g) = graph(3, 4);
    let region = capacity_region(&g, &p, SearchConfig::with_grid(128)).unwrap();
    let spec = SliceSpec::new(vec![(0, 0.5)], 1, 2, 21);
    assert_eq!(hausdorff_gap(region.as_ref(), region.as_ref(), &spec).unwrap(), 0.0);
    assert!(contains(region.as_ref(), region.as_ref(), 400, 1e-9).holds);
}

#[test]
fn members_are_downward_closed_and_monotone_in_tolerance() {
    let p = channel(10.0, [1.0, 2.0, 4.0]);
    for (group, member) in [(1, 1), (3, 6), (6, 2)] {
        let (_, g) = graph(group, member);
        let region = capacity_region(&g, &p, SearchConfig::default()).unwrap();
        let mut runner = TestRunner::new(Config { cases: 1000, ..Config::default() });
        let unit = 0.0..=1.0f64;
        let case = ([unit.clone(), unit.clone(), unit.clone()], unit.clone(), [unit.clone(), unit.clone(), unit]);
        runner
            .run(&case, |(d, u, shrink)| {
                prop_assume!(d.iter().sum::<f64>() > 1e-3);
                let t = region.radial(&d) * u;
                let x: Vec<f64> = d.iter().map(|v| v * t).collect();
                prop_assert!(region.member(&x, 1e-9).unwrap());
                let lower: Vec<f64> = x.iter().zip(shrink).map(|(v, c)| v * c).collect();
                prop_assert!(region.member(&lower, 1e-9).unwrap());
                let outside: Vec<f64> = d.iter().map(|v| v * (t + 0.05)).collect();
                let mut seen = false;
                for tol in [0.0, 1e-9, 1e-6, 1e-3, 0.1] {
                    let inside = region.member(&outside, tol).unwrap();
                    prop_assert!(inside || !seen);
                    seen |= inside;
                }
                prop_assert!(region.member(&[0.0; 3], 0.0).unwrap());
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn regions_grow_with_power_and_shrink_with_noise() {
    let s = SearchConfig::with_grid(128);
    let base = channel(10.0, [1.0, 2.0, 4.0]);
    for (group, member) in [(1, 1), (5, 3), (8, 6)] {
        let (_, g) = graph(group, member);
        let region = capacity_region(&g, &base, s).unwrap();
        let louder = capacity_region(&g, &channel(12.0, [1.0, 2.0, 4.0]), s).unwrap();
        let noisier = capacity_region(&g, &channel(10.0, [1.0, 3.0, 4.0]), s).unwrap();
        assert!(contains(louder.as_ref(), region.as_ref(), 400, 1e-9).holds, "G1{group} ∪ G2{member}");
        assert!(contains(region.as_ref(), noisier.as_ref(), 400, 1e-9).holds, "G1{group} ∪ G2{member}");
        assert!(!contains(region.as_ref(), louder.as_ref(), 400, 1e-9).holds, "G1{group} ∪ G2{member}");
        let outer = bestknown_outer_region(&g, &base, s).unwrap();
        let outer_louder = bestknown_outer_region(&g, &channel(12.0, [1.0, 2.0, 4.0]), s).unwrap();
        assert!(contains(&outer_louder, &outer, 400, 1e-9).holds);
    }
}
