use alloc::vec::Vec;
use core::f64::consts::TAU as TWO_PI;

use crate::digest::Fnv;
use crate::{Error, Result};

/// Superradiant idler decay constant Γ₃ᴺ used when none is given, in Γ₃.
pub const DEFAULT_GAMMA3N: f64 = 5.0;
/// Pump pulse width used when none is given, in Γ₃⁻¹.
pub const DEFAULT_TAU: f64 = 0.25;

/// Frequency and phase shifts applied to the photon pair of one ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleShift {
    delta_p: f64,
    delta_q: f64,
    theta: f64,
}

impl EnsembleShift {
    /// `delta_p` shifts the idler, `delta_q` shifts signal and idler jointly
    /// (both in Γ₃); `theta` is reduced into `[0, 2π)`.
    pub fn new(delta_p: f64, delta_q: f64, theta: f64) -> Result<Self> {
        if !delta_p.is_finite() {
            return Err(Error::InvalidParameter { name: "delta_p", reason: "must be finite" });
        }
        if !delta_q.is_finite() {
            return Err(Error::InvalidParameter { name: "delta_q", reason: "must be finite" });
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter { name: "theta", reason: "must be finite" });
        }
        Ok(EnsembleShift { delta_p, delta_q, theta: reduce_phase(theta) })
    }

    /// An unshifted ensemble.
    pub fn zero() -> Self {
        EnsembleShift { delta_p: 0.0, delta_q: 0.0, theta: 0.0 }
    }

    pub fn delta_p(&self) -> f64 {
        self.delta_p
    }

    pub fn delta_q(&self) -> f64 {
        self.delta_q
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Reduce a phase into `[0, 2π)`.
pub fn reduce_phase(theta: f64) -> f64 {
    let r = theta - TWO_PI * libm::floor(theta / TWO_PI);
    // r can round up to exactly 2π for tiny negative inputs
    if !(0.0..TWO_PI).contains(&r) {
        0.0
    } else {
        r
    }
}

/// A complete multiplexed source: the shifted ensembles plus the shared
/// superradiant decay constant and pump pulse width.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplexConfig {
    ensembles: Vec<EnsembleShift>,
    gamma3n: f64,
    tau: f64,
}

impl MultiplexConfig {
    pub fn new(ensembles: Vec<EnsembleShift>, gamma3n: f64, tau: f64) -> Result<Self> {
        if ensembles.is_empty() {
            return Err(Error::InvalidParameter {
                name: "ensembles",
                reason: "at least one ensemble is required",
            });
        }
        if !(gamma3n.is_finite() && gamma3n > 0.0) {
            return Err(Error::InvalidParameter { name: "gamma3N", reason: "must be finite and > 0" });
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter { name: "tau", reason: "must be finite and > 0" });
        }
        Ok(MultiplexConfig { ensembles, gamma3n, tau })
    }

    /// One unshifted ensemble.
    pub fn single(gamma3n: f64, tau: f64) -> Result<Self> {
        Self::new(alloc::vec![EnsembleShift::zero()], gamma3n, tau)
    }

    pub fn ensembles(&self) -> &[EnsembleShift] {
        &self.ensembles
    }

    pub fn gamma3n(&self) -> f64 {
        self.gamma3n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Number of multiplexed ensembles, N_MP.
    pub fn len(&self) -> usize {
        self.ensembles.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same source with `offset` added to every ensemble phase.
    pub fn with_global_phase(&self, offset: f64) -> Result<Self> {
        let ensembles = self
            .ensembles
            .iter()
            .map(|e| EnsembleShift::new(e.delta_p, e.delta_q, e.theta + offset))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ensembles, self.gamma3n, self.tau)
    }

    /// Same source with every shift and phase negated. Its amplitude at
    /// `(-ws, -wi)` is the complex conjugate of this one at `(ws, wi)`.
    pub fn reflected(&self) -> Self {
        let ensembles = self
            .ensembles
            .iter()
            .map(|e| EnsembleShift {
                delta_p: -e.delta_p,
                delta_q: -e.delta_q,
                theta: reduce_phase(-e.theta),
            })
            .collect();
        MultiplexConfig { ensembles, gamma3n: self.gamma3n, tau: self.tau }
    }

    pub(crate) fn hash_into(&self, h: &mut Fnv) {
        h.usize(self.ensembles.len()).f64(self.gamma3n).f64(self.tau);
        for e in &self.ensembles {
            h.f64(e.delta_p).f64(e.delta_q).f64(e.theta);
        }
    }
}
