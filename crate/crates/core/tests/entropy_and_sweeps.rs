use std::f64::consts::PI;

use biphoton_core::entanglement::{additivity_check, entropy_for, entropy_of_entanglement, qudit_entropy};
use biphoton_core::schmidt::schmidt_decompose;
use biphoton_core::sweep::{
    convergence_check, find_extrema, preset, sweep_entropy, three_symmetric, two_symmetric, Link, SweepAxis, SweepPlan,
    Template,
};
use biphoton_core::{build_kernel, c64, DiscretizedKernel, EnsembleShift, FrequencyGrid, MultiplexConfig};
use faer::Mat;

fn path(s: &str) -> biphoton_core::sweep::ParamPath {
    s.parse().unwrap()
}

fn single(delta_p: f64) -> MultiplexConfig {
    MultiplexConfig::new(vec![EnsembleShift::new(delta_p, 0.0, 0.0).unwrap()], 5.0, 0.25).unwrap()
}

#[test]
fn entropy_respects_bounds() {
    let grid = FrequencyGrid::square(300.0, 128).unwrap();
    for c in [single(0.0), two_symmetric(5.0, PI).unwrap(), three_symmetric(50.0, 0.0, 0.0).unwrap()] {
        let spectrum = schmidt_decompose(&build_kernel(&c, &grid).unwrap(), 64).unwrap();
        let s = entropy_of_entanglement(&spectrum).unwrap();
        let nonzero = spectrum.eigenvalues().iter().filter(|&&l| l > 0.0).count();
        assert!(s.bits >= 0.0 && s.bits <= (nonzero as f64).log2());
        assert!((0.0..=1.0).contains(&s.lambda_tail));
        assert_eq!(s.config_digest, spectrum.digest());
    }
}

#[test]
fn product_kernel_has_zero_entropy_at_any_resolution() {
    for n in [32, 64] {
        let grid = FrequencyGrid::square(10.0, n).unwrap();
        let m = Mat::<c64>::from_fn(n, n, |j, k| c64::new((-(j as f64) / 9.0).exp(), 0.3) * c64::new(1.0 + k as f64, -(k as f64)));
        let kernel = DiscretizedKernel::from_weighted(m, &grid).unwrap();
        let s = entropy_of_entanglement(&schmidt_decompose(&kernel, 4).unwrap()).unwrap();
        assert!(s.bits < 1e-6, "{}", s.bits);
    }
}

#[test]
fn fast_and_full_paths_agree() {
    let grid = FrequencyGrid::square(300.0, 200).unwrap();
    let c = two_symmetric(20.0, 2.0).unwrap();
    let full = entropy_of_entanglement(&schmidt_decompose(&build_kernel(&c, &grid).unwrap(), 4).unwrap()).unwrap();
    assert!((full.bits - entropy_for(&c, &grid).unwrap()).abs() < 1e-12);
}

#[test]
fn single_ensemble_shift_barely_moves_entropy() {
    let grid = FrequencyGrid::square(300.0, 512).unwrap();
    let reference = entropy_for(&single(0.0), &grid).unwrap();
    for dp in [5.0, -5.0, 20.0] {
        let s = entropy_for(&single(dp), &grid).unwrap();
        assert!((s - reference).abs() < 1e-3, "delta_p {dp}: {s} vs {reference}");
    }
}

#[test]
fn coincident_pair_matches_single_ensemble() {
    let grid = FrequencyGrid::square(300.0, 256).unwrap();
    let a = additivity_check(&two_symmetric(0.0, 0.0).unwrap(), &grid).unwrap();
    assert!((a.multi - a.single).abs() < 1e-9);
    assert!((a.deviation + 1.0).abs() < 1e-9);
    assert_eq!(a.qudit, 1.0);
}

#[test]
fn well_separated_triplet_is_nearly_additive() {
    let grid = FrequencyGrid::square(300.0, 512).unwrap();
    let a = additivity_check(&three_symmetric(50.0, 0.0, 0.0).unwrap(), &grid).unwrap();
    assert_eq!(a.qudit, qudit_entropy(3).unwrap());
    assert!(a.deviation.abs() < 0.2, "{a:?}");
}

#[test]
fn entropy_minimum_sits_at_opposite_phase() {
    let grid = FrequencyGrid::square(300.0, 512).unwrap();
    let mut template = preset("two-symmetric").unwrap();
    template = Template::new(template.instantiate(&[(path("delta_p1"), 5.0)]).unwrap(), template.links.clone()).unwrap();
    let axis = SweepAxis::phase(path("theta2"), 33).unwrap();
    let map = sweep_entropy(&template, axis, None, &grid).unwrap();
    assert!(map.failures.is_empty());
    let values: Vec<f64> = map.values().iter().map(|v| v.unwrap()).collect();
    let argmin = (0..33).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    assert!(argmin.abs_diff(16) <= 1, "argmin at index {argmin}");
    // both ends of the axis describe the same physical phase
    assert!((values[0] - values[32]).abs() < 1e-9);
}

#[test]
fn sweeps_are_deterministic_and_cellwise() {
    let grid = FrequencyGrid::square(300.0, 64).unwrap();
    let template = preset("three-symmetric").unwrap();
    let a1 = SweepAxis::linspace(path("delta_p1"), 0.0, 30.0, 4).unwrap();
    let a2 = SweepAxis::phase(path("theta2"), 5).unwrap();
    let first = sweep_entropy(&template, a1.clone(), Some(a2.clone()), &grid).unwrap();
    let second = sweep_entropy(&template, a1.clone(), Some(a2.clone()), &grid).unwrap();
    assert_eq!(first, second);

    let plan = SweepPlan::new(template, a1, Some(a2), grid.clone()).unwrap();
    let reversed: Vec<_> = (0..plan.cell_count()).rev().map(|c| plan.evaluate(c)).collect();
    let assembled = plan.assemble(reversed.into_iter().rev().collect());
    assert_eq!(assembled, first);
    for i in 0..4 {
        for j in 0..5 {
            let direct = entropy_for(&plan.config_at(i, j).unwrap(), &grid).ok();
            assert_eq!(first.get(i, j).map(f64::to_bits), direct.map(f64::to_bits));
        }
    }
}

#[test]
fn mirror_link_holds_across_a_shift_sweep() {
    let template = preset("two-symmetric").unwrap();
    let axis = SweepAxis::linspace(path("delta_p1"), -40.0, 40.0, 9).unwrap();
    let plan = SweepPlan::new(template, axis, None, FrequencyGrid::square(300.0, 16).unwrap()).unwrap();
    for i in 0..9 {
        let c = plan.config_at(i, 0).unwrap();
        assert_eq!(c.ensembles()[1].delta_p(), -c.ensembles()[0].delta_p());
    }
    let link: Link = "mirror:1:2".parse().unwrap();
    assert_eq!(link.to_string(), "mirror:1:2");
}

#[test]
fn null_cell_is_reported_not_interpolated() {
    let template = Template::new(two_symmetric(0.0, PI).unwrap(), preset("two-symmetric").unwrap().links.clone()).unwrap();
    let axis = SweepAxis::new(path("delta_p1"), vec![0.0, 5.0]).unwrap();
    let map = sweep_entropy(&template, axis, None, &FrequencyGrid::square(300.0, 64).unwrap()).unwrap();
    assert_eq!(map.get(0, 0), None);
    assert!(map.get(1, 0).is_some());
    assert_eq!(map.failures.len(), 1);
    assert!(map.failures[0].error.is_null_kernel());
    let report = find_extrema(&map).unwrap();
    assert_eq!(report.global_min.i, 1);
}

#[test]
fn baseline_resolution_is_converged() {
    let conv = convergence_check(&single(0.0), &FrequencyGrid::square(300.0, 512).unwrap(), 2).unwrap();
    assert!(conv.delta < 1e-3, "{conv:?}");
    assert_eq!(conv.delta, (conv.fine - conv.coarse).abs());
}
