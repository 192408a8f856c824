use std::f64::consts::PI;

use biphoton_core::schmidt::{
    mode_density, oracle_reduced_density, schmidt_decompose, schmidt_eigenvalues, DEFAULT_RETAINED,
};
use biphoton_core::{build_kernel, c64, DiscretizedKernel, EnsembleShift, FrequencyGrid, MultiplexConfig, QuadratureScheme};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_config(rng: &mut ChaCha8Rng) -> MultiplexConfig {
    let n = rng.gen_range(1..=3);
    let ensembles = (0..n)
        .map(|_| EnsembleShift::new(rng.gen_range(-60.0..60.0), 0.0, rng.gen_range(0.0..2.0 * PI)).unwrap())
        .collect();
    MultiplexConfig::new(ensembles, 5.0, 0.25).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn random_matrix_matches_gram_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let grid = FrequencyGrid::square(1.0, 16).unwrap();
    for _ in 0..5 {
        let m = Mat::<c64>::from_fn(16, 16, |_, _| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let kernel = DiscretizedKernel::from_weighted(m, &grid).unwrap();
        let svd = schmidt_eigenvalues(&kernel).unwrap();
        let oracle = oracle_reduced_density(&kernel).unwrap();
        assert!(max_abs_diff(&svd, &oracle) < 1e-10, "{svd:?}\n{oracle:?}");
    }
}

#[test]
fn decomposition_agrees_with_oracle_on_small_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(128);
    for (n, scheme) in [
        (128, QuadratureScheme::UniformMidpoint),
        (96, QuadratureScheme::GaussLegendre { panels: 12 }),
    ] {
        let grid = FrequencyGrid::new((-300.0, 300.0), (-300.0, 300.0), n, n, scheme).unwrap();
        for _ in 0..3 {
            let c = random_config(&mut rng);
            let kernel = build_kernel(&c, &grid).unwrap();
            let spectrum = schmidt_decompose(&kernel, 8).unwrap();
            let oracle = oracle_reduced_density(&kernel).unwrap();
            assert!(max_abs_diff(spectrum.eigenvalues(), &oracle) < 1e-8);
        }
    }
}

#[test]
fn two_ensemble_oracle_example() {
    let grid = FrequencyGrid::square(300.0, 128).unwrap();
    let c = biphoton_core::sweep::two_symmetric(5.0, 0.0).unwrap();
    let kernel = build_kernel(&c, &grid).unwrap();
    let spectrum = schmidt_decompose(&kernel, DEFAULT_RETAINED).unwrap();
    let oracle = oracle_reduced_density(&kernel).unwrap();
    assert!(max_abs_diff(spectrum.eigenvalues(), &oracle) < 1e-8);
}

#[test]
fn eigenvalues_are_complete_and_descending() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = FrequencyGrid::new((-300.0, 300.0), (-200.0, 250.0), 160, 120, QuadratureScheme::UniformMidpoint).unwrap();
    for _ in 0..4 {
        let kernel = build_kernel(&random_config(&mut rng), &grid).unwrap();
        let spectrum = schmidt_decompose(&kernel, 10).unwrap();
        let lambda = spectrum.eigenvalues();
        assert_eq!(lambda.len(), 120);
        assert!((lambda.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(lambda.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(spectrum.retained_count(), 10);
    }
}

#[test]
fn modes_are_orthonormal_under_quadrature() {
    let grid = FrequencyGrid::new((-300.0, 300.0), (-300.0, 300.0), 120, 120, QuadratureScheme::GaussLegendre { panels: 20 }).unwrap();
    let c = biphoton_core::sweep::three_symmetric(6.0, PI / 3.0, 5.0 * PI / 3.0).unwrap();
    let spectrum = schmidt_decompose(&build_kernel(&c, &grid).unwrap(), 6).unwrap();
    for (axis, pick) in [(grid.signal(), true), (grid.idler(), false)] {
        let w = axis.weights();
        for a in 1..=6 {
            for b in 1..=6 {
                let (x, y) = if pick {
                    (spectrum.signal_mode(a).unwrap(), spectrum.signal_mode(b).unwrap())
                } else {
                    (spectrum.idler_mode(a).unwrap(), spectrum.idler_mode(b).unwrap())
                };
                let ip = x.iter().zip(y).zip(w).fold(c64::new(0.0, 0.0), |acc, ((p, q), &wk)| acc + p.conj() * q * wk);
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - c64::new(expected, 0.0)).norm() < 1e-8, "<{a}|{b}> = {ip}");
            }
        }
    }
}

#[test]
fn mode_densities_integrate_to_one() {
    let grid = FrequencyGrid::square(300.0, 256).unwrap();
    let spectrum = schmidt_decompose(&build_kernel(&biphoton_core::sweep::two_symmetric(20.0, 1.0).unwrap(), &grid).unwrap(), 4).unwrap();
    for n in 1..=4 {
        let (s, i) = mode_density(&spectrum, n).unwrap();
        assert!((grid.signal().integrate(&s) - 1.0).abs() < 1e-6);
        assert!((grid.idler().integrate(&i) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn gauge_makes_largest_signal_sample_real_positive() {
    let grid = FrequencyGrid::square(300.0, 128).unwrap();
    let spectrum = schmidt_decompose(&build_kernel(&biphoton_core::sweep::two_symmetric(5.0, 2.0).unwrap(), &grid).unwrap(), 5).unwrap();
    for n in 1..=5 {
        let psi = spectrum.signal_mode(n).unwrap();
        let peak = psi.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        assert!(peak.re > 0.0 && peak.im.abs() <= 1e-12 * peak.re, "{peak}");
    }
}

#[test]
fn truncated_reconstruction_residual_is_bounded() {
    let grid = FrequencyGrid::square(300.0, 128).unwrap();
    let kernel = build_kernel(&biphoton_core::sweep::three_symmetric(30.0, 1.0, 2.0).unwrap(), &grid).unwrap();
    for retained in [1, 4, 16, 128] {
        let spectrum = schmidt_decompose(&kernel, retained).unwrap();
        let residual = (spectrum.reconstruct() - kernel.matrix()).norm_l2();
        let kept: f64 = spectrum.eigenvalues()[..retained].iter().sum();
        let bound = (1.0 - kept).max(0.0).sqrt() + 1e-6;
        assert!(residual <= bound, "retained {retained}: {residual} > {bound}");
    }
}

#[test]
fn eigenvalues_invariant_under_phase_and_reflection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = FrequencyGrid::square(300.0, 128).unwrap();
    for _ in 0..6 {
        let c = random_config(&mut rng);
        let base = schmidt_eigenvalues(&build_kernel(&c, &grid).unwrap()).unwrap();
        let phased = schmidt_eigenvalues(&build_kernel(&c.with_global_phase(rng.gen_range(0.0..2.0 * PI)).unwrap(), &grid).unwrap()).unwrap();
        let reflected = schmidt_eigenvalues(&build_kernel(&c.reflected(), &grid).unwrap()).unwrap();
        assert!(max_abs_diff(&base, &phased) < 1e-10);
        assert!(max_abs_diff(&base, &reflected) < 1e-10);
    }
}

#[test]
fn baseline_leading_eigenvalue_matches_oracle() {
    let grid = FrequencyGrid::square(300.0, 1024).unwrap();
    let kernel = build_kernel(&MultiplexConfig::single(5.0, 0.25).unwrap(), &grid).unwrap();
    let spectrum = schmidt_decompose(&kernel, 8).unwrap();
    let oracle = oracle_reduced_density(&kernel).unwrap();
    assert!((spectrum.eigenvalues()[0] - oracle[0]).abs() < 1e-8);
}
