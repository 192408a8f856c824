//! Entropy of entanglement and the qudit-additivity estimate.

use alloc::string::String;

use crate::schmidt::{schmidt_eigenvalues, SchmidtSpectrum};
use crate::{build_kernel, EnsembleShift, Error, FrequencyGrid, MultiplexConfig, Result};

/// Eigenvalues below this contribute exactly zero (0 · log 0 = 0).
pub const LAMBDA_FLOOR: f64 = 1e-30;
/// Eigenvalues more negative than this indicate a broken decomposition.
pub const NEGATIVE_LAMBDA_LIMIT: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResult {
    /// Entropy of entanglement in bits.
    pub bits: f64,
    /// `1 - Σ λₙ` over the retained modes.
    pub lambda_tail: f64,
    pub config_digest: String,
}

/// `S = -Σ λ log₂ λ` in bits.
pub fn entropy_bits(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for (index, &l) in eigenvalues.iter().enumerate() {
        if l < NEGATIVE_LAMBDA_LIMIT || l.is_nan() {
            return Err(Error::NumericalSanity { index: index + 1, value: l });
        }
        if l >= LAMBDA_FLOOR {
            s -= l * libm::log2(l);
        }
    }
    // round-off can leave a pure state at -0.0 or -1e-17
    Ok(s.max(0.0))
}

/// Entropy of a decomposed state, summed over every Schmidt eigenvalue.
pub fn entropy_of_entanglement(spectrum: &SchmidtSpectrum) -> Result<EntropyResult> {
    let lambda = spectrum.eigenvalues();
    let bits = entropy_bits(lambda)?;
    let retained: f64 = lambda[..spectrum.retained_count()].iter().sum();
    Ok(EntropyResult {
        bits,
        lambda_tail: (1.0 - retained).clamp(0.0, 1.0),
        config_digest: String::from(spectrum.digest()),
    })
}

/// Entropy of `config` on `grid`, computed from singular values alone.
pub fn entropy_for(config: &MultiplexConfig, grid: &FrequencyGrid) -> Result<f64> {
    let kernel = build_kernel(config, grid)?;
    entropy_bits(&schmidt_eigenvalues(&kernel)?)
}

/// Entropy of a maximally entangled pair of `n_mp`-level systems, log₂ n_mp.
pub fn qudit_entropy(n_mp: usize) -> Result<f64> {
    if n_mp == 0 {
        return Err(Error::InvalidParameter { name: "n_mp", reason: "must be >= 1" });
    }
    Ok(libm::log2(n_mp as f64))
}

/// Comparison of a multiplexed source against `S_d + S_single`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Additivity {
    pub multi: f64,
    pub single: f64,
    pub qudit: f64,
    /// `multi - (qudit + single)`.
    pub deviation: f64,
}

/// Entropy of `config` against the estimate `log₂ N_MP + S(single ensemble)`,
/// the single ensemble being unshifted with the same Γ₃ᴺ and τ.
///
/// Requires at least two ensembles and no joint shifts (δq = 0).
pub fn additivity_check(config: &MultiplexConfig, grid: &FrequencyGrid) -> Result<Additivity> {
    if config.len() < 2 {
        return Err(Error::InvalidParameter { name: "ensembles", reason: "additivity needs at least two" });
    }
    if config.ensembles().iter().any(|e| e.delta_q() != 0.0) {
        return Err(Error::InvalidParameter { name: "delta_q", reason: "additivity assumes delta_q = 0" });
    }
    let multi = entropy_for(config, grid)?;
    let reference = MultiplexConfig::new(alloc::vec![EnsembleShift::zero()], config.gamma3n(), config.tau())?;
    let single = entropy_for(&reference, grid)?;
    let qudit = qudit_entropy(config.len())?;
    Ok(Additivity { multi, single, qudit, deviation: multi - (qudit + single) })
}
