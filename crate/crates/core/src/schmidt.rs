//! Schmidt decomposition of a discretized joint spectral amplitude.
//!
//! The weighted kernel `K[j,k] = √w_s[j] f(s_j, i_k) √w_i[k]` turns the
//! continuous Schmidt problem into a matrix SVD: `K = U Σ V†` gives
//! `λₙ = σₙ² / Σσ²`, `ψₙ(s_j) = U[j,n] / √w_s[j]` and
//! `φₙ(i_k) = conj(V[k,n]) / √w_i[k]`, so that
//! `f ≈ Σₙ √λₙ ψₙ(s) φₙ(i)`.
//!
//! [`oracle_reduced_density`] computes the same spectrum by a different
//! route (Hermitian eigenvalues of `K K†`) and serves as an independent
//! check.

use alloc::string::String;
use alloc::vec::Vec;

use faer::Mat;

use crate::hermitian::jacobi_eigenvalues;

use crate::{c64, DiscretizedKernel, Error, FrequencyGrid, Result};

/// Modes kept by default; the eigenvalue list is always complete.
pub const DEFAULT_RETAINED: usize = 64;

/// Eigenvalues and mode functions of a decomposed kernel.
#[derive(Debug, Clone)]
pub struct SchmidtSpectrum {
    eigenvalues: Vec<f64>,
    signal_modes: Vec<Vec<c64>>,
    idler_modes: Vec<Vec<c64>>,
    grid: FrequencyGrid,
    digest: String,
}

impl SchmidtSpectrum {
    /// All Schmidt eigenvalues λₙ, descending, summing to one.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn retained_count(&self) -> usize {
        self.signal_modes.len()
    }

    /// Samples of ψₙ on the signal nodes, `n` counted from 1.
    pub fn signal_mode(&self, n: usize) -> Result<&[c64]> {
        self.check_index(n)?;
        Ok(&self.signal_modes[n - 1])
    }

    /// Samples of φₙ on the idler nodes, `n` counted from 1.
    pub fn idler_mode(&self, n: usize) -> Result<&[c64]> {
        self.check_index(n)?;
        Ok(&self.idler_modes[n - 1])
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// Digest of the kernel this spectrum came from.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.retained_count() {
            return Err(Error::IndexOutOfRange { index: n, len: self.retained_count() });
        }
        Ok(())
    }

    /// Weighted kernel rebuilt from the retained modes,
    /// `Σₙ √λₙ √w_s ψₙ ⊗ √w_i φₙ`.
    pub fn reconstruct(&self) -> Mat<c64> {
        let (s, i) = (self.grid.signal(), self.grid.idler());
        let mut out = Mat::<c64>::zeros(s.len(), i.len());
        for n in 0..self.retained_count() {
            let amp = libm::sqrt(self.eigenvalues[n]);
            let psi = &self.signal_modes[n];
            let phi = &self.idler_modes[n];
            for k in 0..i.len() {
                let b = phi[k] * (amp * libm::sqrt(i.weights()[k]));
                for j in 0..s.len() {
                    out[(j, k)] += psi[j] * libm::sqrt(s.weights()[j]) * b;
                }
            }
        }
        out
    }
}

fn normalized_squares(singular_values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut lambda: Vec<f64> = singular_values.map(|s| s * s).collect();
    let total: f64 = lambda.iter().sum();
    if total > 0.0 {
        lambda.iter_mut().for_each(|l| *l /= total);
    }
    lambda
}

/// Full Schmidt decomposition, keeping the first `retained` mode pairs.
///
/// Mode phases are fixed so that the largest-magnitude sample of each ψₙ is
/// real and positive; the compensating phase goes into φₙ.
pub fn schmidt_decompose(kernel: &DiscretizedKernel, retained: usize) -> Result<SchmidtSpectrum> {
    let svd = kernel
        .matrix()
        .thin_svd()
        .map_err(|_| Error::Decomposition("singular value decomposition did not converge"))?;
    let sigma = svd.S().column_vector();
    let eigenvalues = normalized_squares(sigma.iter().map(|s| s.re));
    let grid = kernel.grid();
    let (u, v) = (svd.U(), svd.V());
    let keep = retained.min(eigenvalues.len());

    let mut signal_modes = Vec::with_capacity(keep);
    let mut idler_modes = Vec::with_capacity(keep);
    for n in 0..keep {
        let mut psi: Vec<c64> = grid
            .signal()
            .weights()
            .iter()
            .enumerate()
            .map(|(j, &w)| u[(j, n)] / libm::sqrt(w))
            .collect();
        let mut phi: Vec<c64> = grid
            .idler()
            .weights()
            .iter()
            .enumerate()
            .map(|(k, &w)| v[(k, n)].conj() / libm::sqrt(w))
            .collect();
        let gauge = largest(&psi);
        let mag = libm::hypot(gauge.re, gauge.im);
        if mag > 0.0 {
            let rot = gauge.conj() / mag;
            psi.iter_mut().for_each(|z| *z *= rot);
            let back = rot.conj();
            phi.iter_mut().for_each(|z| *z *= back);
        }
        signal_modes.push(psi);
        idler_modes.push(phi);
    }

    Ok(SchmidtSpectrum {
        eigenvalues,
        signal_modes,
        idler_modes,
        grid: grid.clone(),
        digest: kernel.digest(),
    })
}

fn largest(samples: &[c64]) -> c64 {
    // first occurrence wins ties, keeping the gauge deterministic
    let mut best = c64::new(0.0, 0.0);
    let mut best_mag = -1.0;
    for &z in samples {
        let m = z.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = z;
        }
    }
    best
}

/// Schmidt eigenvalues only (descending); cheaper than a full
/// decomposition.
pub fn schmidt_eigenvalues(kernel: &DiscretizedKernel) -> Result<Vec<f64>> {
    let sigma = kernel
        .matrix()
        .singular_values()
        .map_err(|_| Error::Decomposition("singular value computation did not converge"))?;
    Ok(normalized_squares(sigma.into_iter()))
}

/// Eigenvalues of the reduced signal density matrix `ρ = K K†`, descending.
///
/// Shares no code with the SVD path: `ρ` is formed explicitly and
/// diagonalized by cyclic Jacobi rotations. Cost grows as n³ per sweep, so
/// keep grids to a few hundred points per axis.
pub fn oracle_reduced_density(kernel: &DiscretizedKernel) -> Result<Vec<f64>> {
    let k = kernel.matrix();
    let (rows, cols) = (k.nrows(), k.ncols());
    // row-major copy so the inner products below run over contiguous memory
    let flat: Vec<c64> = (0..rows).flat_map(|a| (0..cols).map(move |c| k[(a, c)])).collect();
    let mut rho = alloc::vec![c64::new(0.0, 0.0); rows * rows];
    for a in 0..rows {
        let ra = &flat[a * cols..(a + 1) * cols];
        for b in a..rows {
            let rb = &flat[b * cols..(b + 1) * cols];
            let mut sum = c64::new(0.0, 0.0);
            for (x, y) in ra.iter().zip(rb) {
                sum += *x * y.conj();
            }
            rho[a * rows + b] = sum;
            rho[b * rows + a] = sum.conj();
        }
    }
    let mut eig = jacobi_eigenvalues(&mut rho, rows)
        .ok_or(Error::Decomposition("Jacobi eigenvalue iteration did not converge"))?;
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

/// Probability densities `|ψₙ|²` and `|φₙ|²` of the `n`-th mode pair.
pub fn mode_density(spectrum: &SchmidtSpectrum, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let psi = spectrum.signal_mode(n)?;
    let phi = spectrum.idler_mode(n)?;
    Ok((psi.iter().map(|z| z.norm_sqr()).collect(), phi.iter().map(|z| z.norm_sqr()).collect()))
}

/// Clusters of (near-)degenerate eigenvalues, 1-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub groups: Vec<Vec<usize>>,
    pub rel_tol: f64,
}

impl DegeneracyReport {
    /// Whether modes `a` and `b` (1-based) fell in the same cluster.
    pub fn same_group(&self, a: usize, b: usize) -> bool {
        self.groups.iter().any(|g| g.contains(&a) && g.contains(&b))
    }
}

/// Group the first `k` descending eigenvalues: consecutive `n`, `n+1` share a
/// group when `(λₙ - λₙ₊₁) / λₙ < rel_tol`. `k` is capped at the number of
/// eigenvalues available.
pub fn detect_degeneracy(eigenvalues: &[f64], rel_tol: f64, k: usize) -> DegeneracyReport {
    let k = k.min(eigenvalues.len());
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for n in 0..k {
        let joins = n > 0 && {
            let (prev, cur) = (eigenvalues[n - 1], eigenvalues[n]);
            if prev > 0.0 {
                (prev - cur) / prev < rel_tol
            } else {
                cur == prev
            }
        };
        match groups.last_mut() {
            Some(g) if joins => g.push(n + 1),
            _ => groups.push(alloc::vec![n + 1]),
        }
    }
    DegeneracyReport { groups, rel_tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::QuadratureScheme;

    fn unit_grid(n: usize) -> FrequencyGrid {
        FrequencyGrid::new((0.0, 1.0), (0.0, 1.0), n, n, QuadratureScheme::UniformMidpoint).unwrap()
    }

    #[test]
    fn separable_kernel_is_pure() {
        let grid = unit_grid(12);
        let m = Mat::from_fn(12, 12, |j, k| {
            c64::new(1.0 + j as f64, 0.5) * c64::new(libm::cos(k as f64), libm::sin(2.0 * k as f64))
        });
        let kernel = DiscretizedKernel::from_weighted(m, &grid).unwrap();
        let s = schmidt_decompose(&kernel, 4).unwrap();
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!(s.eigenvalues()[1..].iter().all(|l| l.abs() < 1e-12));
        let oracle = oracle_reduced_density(&kernel).unwrap();
        assert!((oracle[0] - 1.0).abs() < 1e-12);
        assert!(oracle[1..].iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn diagonal_two_by_two() {
        let grid = unit_grid(2);
        let m = Mat::from_fn(2, 2, |j, k| match (j, k) {
            (0, 0) => c64::new(2.0, 0.0),
            (1, 1) => c64::new(1.0, 0.0),
            _ => c64::new(0.0, 0.0),
        });
        let kernel = DiscretizedKernel::from_weighted(m, &grid).unwrap();
        let s = schmidt_decompose(&kernel, 2).unwrap();
        assert!((s.eigenvalues()[0] - 0.8).abs() < 1e-15);
        assert!((s.eigenvalues()[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn mode_index_is_checked() {
        let grid = unit_grid(4);
        let m = Mat::from_fn(4, 4, |j, k| c64::new((j + 2 * k) as f64, 1.0));
        let s = schmidt_decompose(&DiscretizedKernel::from_weighted(m, &grid).unwrap(), 2).unwrap();
        assert_eq!(s.retained_count(), 2);
        assert!(mode_density(&s, 1).is_ok());
        assert_eq!(mode_density(&s, 0).unwrap_err(), Error::IndexOutOfRange { index: 0, len: 2 });
        assert_eq!(mode_density(&s, 3).unwrap_err(), Error::IndexOutOfRange { index: 3, len: 2 });
    }

    #[test]
    fn degeneracy_grouping() {
        let r = detect_degeneracy(&[0.30, 0.30, 0.20, 0.20], 0.01, 4);
        assert_eq!(r.groups, [alloc::vec![1, 2], alloc::vec![3, 4]]);
        let r = detect_degeneracy(&[0.6, 0.4], 0.01, 2);
        assert_eq!(r.groups, [alloc::vec![1], alloc::vec![2]]);
        assert!(!r.same_group(1, 2));
        let r = detect_degeneracy(&[0.5, 0.25, 0.0, 0.0], 0.5, 10);
        assert_eq!(r.groups, [alloc::vec![1], alloc::vec![2], alloc::vec![3, 4]]);
    }
}
