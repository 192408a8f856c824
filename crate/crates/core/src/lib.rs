//! Joint spectral amplitudes of biphotons emitted by frequency- and
//! phase-multiplexed atomic ensembles, their Schmidt decomposition on a
//! quadrature grid, and the entropy of entanglement over parameter sweeps.
//!
//! All frequencies are measured in units of the single-atom idler decay rate
//! Γ₃, times in Γ₃⁻¹ and phases in radians.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. IO, file formats and the command-line driver live in
//! `biphoton-cli`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod config;
mod digest;
mod error;
mod grid;
mod hermitian;
mod kernel;
mod peaks;

pub mod entanglement;
pub mod quadrature;
pub mod schmidt;
pub mod sweep;

pub use config::{EnsembleShift, MultiplexConfig, DEFAULT_GAMMA3N, DEFAULT_TAU};
pub use error::{Error, Result};
pub use grid::{Axis, FrequencyGrid, QuadratureScheme, DEFAULT_RESOLUTION, DEFAULT_WINDOW};
pub use kernel::{
    build_kernel, spectral_amplitude, weighted_amplitudes, DiscretizedKernel, NULL_KERNEL_RTOL,
};
pub use peaks::count_peaks;

/// Complex scalar used throughout; identical to `num_complex::Complex<f64>`.
pub use faer::c64;
