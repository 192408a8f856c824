use faer::{Mat, MatRef};

use crate::digest::Fnv;
use crate::{c64, Error, FrequencyGrid, MultiplexConfig, Result};

/// Relative threshold below which a kernel is considered null. It scales the
/// largest single-ensemble amplitude on the grid times √(area of the grid).
pub const NULL_KERNEL_RTOL: f64 = 1e-10;

/// Multiplexed joint spectral amplitude at detunings `(dws, dwi)`:
///
/// ```text
/// f(ws, wi) = Σₘ exp(iθₘ) · exp(-(ws + wi + δqₘ)² τ² / 8) / (Γ₃ᴺ/2 - i(wi + δpₘ))
/// ```
///
/// The atomic prefactor is dropped; only the shape matters after
/// normalization.
pub fn spectral_amplitude(config: &MultiplexConfig, dws: f64, dwi: f64) -> c64 {
    let mut sum = c64::new(0.0, 0.0);
    for term in terms(config, dws, dwi) {
        sum += term;
    }
    sum
}

fn terms(config: &MultiplexConfig, dws: f64, dwi: f64) -> impl Iterator<Item = c64> + '_ {
    let half_width = 0.5 * config.gamma3n();
    let tau_sq_8 = config.tau() * config.tau() / 8.0;
    config.ensembles().iter().map(move |e| {
        let x = dws + dwi + e.delta_q();
        let envelope = libm::exp(-x * x * tau_sq_8);
        // 1 / (a - ib) = (a + ib) / (a² + b²)
        let b = dwi + e.delta_p();
        let lorentz = c64::new(half_width, b) / (half_width * half_width + b * b);
        let (sin, cos) = libm::sincos(e.theta());
        c64::new(cos, sin) * lorentz * envelope
    })
}

fn abs(z: c64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Quadrature-weighted amplitudes `√w_s[j] · f(s_j, i_k) · √w_i[k]` before
/// normalization. Also returns the largest single-ensemble term magnitude.
fn weighted(config: &MultiplexConfig, grid: &FrequencyGrid) -> (Mat<c64>, f64) {
    let (s, i) = (grid.signal(), grid.idler());
    let sqrt_ws: alloc::vec::Vec<f64> = s.weights().iter().map(|&w| libm::sqrt(w)).collect();
    let sqrt_wi: alloc::vec::Vec<f64> = i.weights().iter().map(|&w| libm::sqrt(w)).collect();
    let mut max_term = 0.0f64;
    let m = Mat::from_fn(s.len(), i.len(), |j, k| {
        let mut sum = c64::new(0.0, 0.0);
        for t in terms(config, s.nodes()[j], i.nodes()[k]) {
            max_term = max_term.max(abs(t));
            sum += t;
        }
        sum * (sqrt_ws[j] * sqrt_wi[k])
    });
    (m, max_term)
}

/// The weighted, unnormalized kernel matrix. Linear in the ensemble list.
pub fn weighted_amplitudes(config: &MultiplexConfig, grid: &FrequencyGrid) -> Mat<c64> {
    weighted(config, grid).0
}

/// Quadrature-weighted, unit-Frobenius-norm discretization of the joint
/// spectral amplitude on a grid.
///
/// Singular values of `matrix` are the Schmidt coefficients of the
/// post-selected state; dividing singular vectors by `√w` recovers mode
/// function samples.
#[derive(Debug, Clone)]
pub struct DiscretizedKernel {
    matrix: Mat<c64>,
    norm_constant: f64,
    grid: FrequencyGrid,
    config: Option<MultiplexConfig>,
}

/// Evaluate and normalize the kernel of `config` on `grid`.
///
/// Fails with [`Error::NullKernel`] when the ensembles cancel (for example
/// two unshifted ensembles a phase π apart).
pub fn build_kernel(config: &MultiplexConfig, grid: &FrequencyGrid) -> Result<DiscretizedKernel> {
    let (mut matrix, max_term) = weighted(config, grid);
    let norm = matrix.norm_l2();
    let area = grid.signal().length() * grid.idler().length();
    let threshold = NULL_KERNEL_RTOL * max_term * libm::sqrt(area);
    // also rejects a NaN norm
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(norm >= threshold) || norm == 0.0 {
        return Err(Error::NullKernel { norm, threshold });
    }
    let inv = 1.0 / norm;
    matrix.col_iter_mut().for_each(|col| col.iter_mut().for_each(|z| *z *= inv));
    Ok(DiscretizedKernel { matrix, norm_constant: norm, grid: grid.clone(), config: Some(config.clone()) })
}

impl DiscretizedKernel {
    /// Wrap an arbitrary weighted matrix, normalizing it to unit Frobenius
    /// norm. Used for synthetic kernels that do not come from a source config.
    pub fn from_weighted(matrix: Mat<c64>, grid: &FrequencyGrid) -> Result<Self> {
        if matrix.shape() != grid.shape() {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: "shape does not match the grid",
            });
        }
        let norm = matrix.norm_l2();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NullKernel { norm, threshold: 0.0 });
        }
        let mut matrix = matrix;
        let inv = 1.0 / norm;
        matrix.col_iter_mut().for_each(|col| col.iter_mut().for_each(|z| *z *= inv));
        Ok(DiscretizedKernel { matrix, norm_constant: norm, grid: grid.clone(), config: None })
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    /// Frobenius norm of the weighted matrix before normalization.
    pub fn norm_constant(&self) -> f64 {
        self.norm_constant
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// `None` for synthetic kernels.
    pub fn config(&self) -> Option<&MultiplexConfig> {
        self.config.as_ref()
    }

    /// Hex tag identifying the config and grid this kernel was built from.
    pub fn digest(&self) -> alloc::string::String {
        let mut h = Fnv::new();
        match &self.config {
            Some(c) => c.hash_into(&mut h),
            None => {
                h.bytes(b"synthetic").f64(self.norm_constant);
            }
        }
        self.grid.hash_into(&mut h);
        alloc::format!("{:016x}", h.finish())
    }
}
