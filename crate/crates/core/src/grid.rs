use alloc::vec::Vec;

use crate::digest::Fnv;
use crate::quadrature;
use crate::{Error, Result};

/// Half-width of the post-selected spectral window, in Γ₃.
pub const DEFAULT_WINDOW: f64 = 300.0;
/// Points per axis for single decompositions.
pub const DEFAULT_RESOLUTION: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureScheme {
    #[default]
    UniformMidpoint,
    /// Composite Gauss–Legendre; the point count must be a multiple of
    /// `panels` and each panel gets `n / panels` nodes.
    GaussLegendre { panels: usize },
}

/// Nodes and positive weights along one frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    range: (f64, f64),
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Axis {
    fn new(name: &'static str, range: (f64, f64), n: usize, scheme: QuadratureScheme) -> Result<Self> {
        let (min, max) = range;
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidRange { axis: name, min, max });
        }
        if n < 2 {
            return Err(Error::InvalidCount { axis: name, count: n, reason: "need at least 2 points" });
        }
        let (nodes, weights) = match scheme {
            QuadratureScheme::UniformMidpoint => quadrature::midpoint(min, max, n),
            QuadratureScheme::GaussLegendre { panels } => {
                if panels == 0 || !n.is_multiple_of(panels) {
                    return Err(Error::InvalidCount {
                        axis: name,
                        count: n,
                        reason: "must be a positive multiple of the panel count",
                    });
                }
                quadrature::composite_gauss_legendre(min, max, panels, n / panels)
            }
        };
        Ok(Axis { range, nodes, weights })
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn length(&self) -> f64 {
        self.range.1 - self.range.0
    }

    /// Quadrature of `samples` taken at the nodes.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        samples.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }
}

/// Discretization of the (Δω_s, Δω_i) rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    signal: Axis,
    idler: Axis,
    scheme: QuadratureScheme,
}

impl FrequencyGrid {
    pub fn new(
        s_range: (f64, f64),
        i_range: (f64, f64),
        n_s: usize,
        n_i: usize,
        scheme: QuadratureScheme,
    ) -> Result<Self> {
        Ok(FrequencyGrid {
            signal: Axis::new("signal", s_range, n_s, scheme)?,
            idler: Axis::new("idler", i_range, n_i, scheme)?,
            scheme,
        })
    }

    /// Square `[-window, window]²` grid with `n` midpoint nodes per axis.
    pub fn square(window: f64, n: usize) -> Result<Self> {
        Self::new((-window, window), (-window, window), n, n, QuadratureScheme::UniformMidpoint)
    }

    pub fn signal(&self) -> &Axis {
        &self.signal
    }

    pub fn idler(&self) -> &Axis {
        &self.idler
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    /// `(n_s, n_i)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.signal.len(), self.idler.len())
    }

    /// Same ranges with `factor` times as many points per axis. Gauss–Legendre
    /// grids keep their per-panel order and multiply the panel count.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidParameter { name: "factor", reason: "must be >= 1" });
        }
        let scheme = match self.scheme {
            QuadratureScheme::UniformMidpoint => QuadratureScheme::UniformMidpoint,
            QuadratureScheme::GaussLegendre { panels } => {
                QuadratureScheme::GaussLegendre { panels: panels * factor }
            }
        };
        Self::new(
            self.signal.range,
            self.idler.range,
            self.signal.len() * factor,
            self.idler.len() * factor,
            scheme,
        )
    }

    pub(crate) fn hash_into(&self, h: &mut Fnv) {
        let (s, i) = (self.signal.range, self.idler.range);
        h.f64(s.0).f64(s.1).f64(i.0).f64(i.1);
        h.usize(self.signal.len()).usize(self.idler.len());
        match self.scheme {
            QuadratureScheme::UniformMidpoint => h.usize(0),
            QuadratureScheme::GaussLegendre { panels } => h.usize(1).usize(panels),
        };
    }
}
