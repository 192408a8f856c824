//! Entropy over one- and two-dimensional parameter grids.
//!
//! A [`SweepPlan`] enumerates independent cells; each cell instantiates a
//! config from a [`Template`], builds its kernel and computes the entropy.
//! Cells can be evaluated in any order or in parallel and reassembled with
//! [`SweepPlan::assemble`], which restores grid order.

mod extrema;
mod params;

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU as TWO_PI;

pub use extrema::{find_extrema, Extremum, ExtremaReport};
pub use params::{preset, three_symmetric, two_symmetric, Field, Link, ParamPath, Preset, Template};

use crate::entanglement::entropy_for;
use crate::{Error, FrequencyGrid, MultiplexConfig, Result};

/// Points per phase axis when none is given.
pub const DEFAULT_PHASE_POINTS: usize = 33;
/// Points per frequency-shift axis when none is given.
pub const DEFAULT_SHIFT_POINTS: usize = 26;
/// Kernel points per axis for each sweep cell.
pub const DEFAULT_CELL_RESOLUTION: usize = 512;

/// Sample points for one swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub target: ParamPath,
    pub values: Vec<f64>,
    pub link: Option<Link>,
}

impl SweepAxis {
    pub fn new(target: ParamPath, values: Vec<f64>) -> Result<Self> {
        let axis = SweepAxis { target, values, link: None };
        axis.validate()?;
        Ok(axis)
    }

    /// `points` evenly spaced values from `start` to `stop`, both included.
    pub fn linspace(target: ParamPath, start: f64, stop: f64, points: usize) -> Result<Self> {
        let values = match points {
            0 => Vec::new(),
            1 => alloc::vec![start],
            _ => {
                let step = (stop - start) / (points - 1) as f64;
                (0..points)
                    .map(|k| if k + 1 == points { stop } else { start + k as f64 * step })
                    .collect()
            }
        };
        Self::new(target, values)
    }

    /// `[0, 2π]` inclusive of both ends.
    pub fn phase(target: ParamPath, points: usize) -> Result<Self> {
        Self::linspace(target, 0.0, TWO_PI, points)
    }

    pub fn with_link(mut self, link: Link) -> Self {
        self.link = Some(link);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spacing between neighbouring samples, or 0 for a single point.
    pub fn step(&self) -> f64 {
        if self.values.len() < 2 {
            0.0
        } else {
            (self.values[self.values.len() - 1] - self.values[0]) / (self.values.len() - 1) as f64
        }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidAxis(format!("{} has no values", self.target)));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidAxis(format!("{} has non-finite values", self.target)));
        }
        let up = self.values.windows(2).all(|w| w[0] < w[1]);
        let down = self.values.windows(2).all(|w| w[0] > w[1]);
        if !(up || down) {
            return Err(Error::InvalidAxis(format!("{} values are not strictly monotone", self.target)));
        }
        Ok(())
    }
}

/// One cell that could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub i: usize,
    pub j: usize,
    pub error: Error,
}

/// Entropy in bits over one or two axes, stored axis1-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyMap {
    pub axis1: SweepAxis,
    pub axis2: Option<SweepAxis>,
    values: Vec<Option<f64>>,
    pub failures: Vec<CellFailure>,
}

impl EntropyMap {
    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.as_ref().map_or(1, SweepAxis::len))
    }

    /// Entropy at `(i, j)`; `None` for failed cells. One-dimensional maps
    /// use `j = 0`.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (n1, n2) = self.shape();
        if i >= n1 || j >= n2 {
            return None;
        }
        self.values[i * n2 + j]
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    /// Coordinates of cell `(i, j)`.
    pub fn coords(&self, i: usize, j: usize) -> (f64, Option<f64>) {
        (self.axis1.values[i], self.axis2.as_ref().map(|a| a.values[j]))
    }

    /// Row `i` along axis2 (or the whole map for one axis).
    pub fn row(&self, i: usize) -> &[Option<f64>] {
        let n2 = self.shape().1;
        &self.values[i * n2..(i + 1) * n2]
    }
}

/// Validated description of a sweep.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    template: Template,
    axis1: SweepAxis,
    axis2: Option<SweepAxis>,
    grid: FrequencyGrid,
}

impl SweepPlan {
    pub fn new(template: Template, axis1: SweepAxis, axis2: Option<SweepAxis>, grid: FrequencyGrid) -> Result<Self> {
        let n = template.base.len();
        for axis in core::iter::once(&axis1).chain(axis2.as_ref()) {
            axis.validate()?;
            if axis.target.ensemble >= n {
                return Err(Error::InvalidAxis(format!(
                    "{} refers to ensemble {} but the template has {n}",
                    axis.target,
                    axis.target.ensemble + 1
                )));
            }
            let links = template.links.iter().chain(axis.link.as_ref());
            for l in links {
                if l.max_index() >= n {
                    return Err(Error::InvalidAxis(format!("link {l} refers to a missing ensemble")));
                }
                if l.writes() == axis.target {
                    return Err(Error::InvalidAxis(format!("{} is overwritten by link {l}", axis.target)));
                }
            }
        }
        if let Some(a2) = &axis2 {
            if a2.target == axis1.target {
                return Err(Error::InvalidAxis(format!("both axes sweep {}", a2.target)));
            }
            if let Some(l) = axis1.link {
                if l.writes() == a2.target {
                    return Err(Error::InvalidAxis(format!("{} is overwritten by link {l}", a2.target)));
                }
            }
            if let Some(l) = a2.link {
                if l.writes() == axis1.target {
                    return Err(Error::InvalidAxis(format!("{} is overwritten by link {l}", axis1.target)));
                }
            }
        }
        Ok(SweepPlan { template, axis1, axis2, grid })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.as_ref().map_or(1, SweepAxis::len))
    }

    pub fn cell_count(&self) -> usize {
        let (a, b) = self.shape();
        a * b
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// Config for cell `(i, j)`.
    pub fn config_at(&self, i: usize, j: usize) -> Result<MultiplexConfig> {
        let mut assignments = alloc::vec![(self.axis1.target, self.axis1.values[i])];
        let mut links: Vec<Link> = self.axis1.link.into_iter().collect();
        if let Some(a2) = &self.axis2 {
            assignments.push((a2.target, a2.values[j]));
            links.extend(a2.link);
        }
        self.template.instantiate_with(&assignments, &links)
    }

    /// Entropy of the cell with flat (axis1-major) index `cell`.
    pub fn evaluate(&self, cell: usize) -> Result<f64> {
        let n2 = self.shape().1;
        let config = self.config_at(cell / n2, cell % n2)?;
        entropy_for(&config, &self.grid)
    }

    /// Collect per-cell results (in flat index order) into a map.
    pub fn assemble(&self, results: Vec<Result<f64>>) -> EntropyMap {
        assert_eq!(results.len(), self.cell_count(), "one result per cell");
        let n2 = self.shape().1;
        let mut values = Vec::with_capacity(results.len());
        let mut failures = Vec::new();
        for (cell, r) in results.into_iter().enumerate() {
            match r {
                Ok(s) => values.push(Some(s)),
                Err(error) => {
                    values.push(None);
                    failures.push(CellFailure { i: cell / n2, j: cell % n2, error });
                }
            }
        }
        EntropyMap { axis1: self.axis1.clone(), axis2: self.axis2.clone(), values, failures }
    }
}

/// Evaluate every cell in order on the current thread.
pub fn sweep_entropy(
    template: &Template,
    axis1: SweepAxis,
    axis2: Option<SweepAxis>,
    grid: &FrequencyGrid,
) -> Result<EntropyMap> {
    let plan = SweepPlan::new(template.clone(), axis1, axis2, grid.clone())?;
    let results = (0..plan.cell_count()).map(|c| plan.evaluate(c)).collect();
    Ok(plan.assemble(results))
}

/// Entropy at a grid and at a refined copy of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub coarse: f64,
    pub fine: f64,
    pub delta: f64,
}

/// Recompute the entropy with `factor` times the points per axis.
pub fn convergence_check(config: &MultiplexConfig, grid: &FrequencyGrid, factor: usize) -> Result<Convergence> {
    let fine_grid = grid.refined(factor)?;
    let coarse = entropy_for(config, grid)?;
    let fine = entropy_for(config, &fine_grid)?;
    Ok(Convergence { coarse, fine, delta: (fine - coarse).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn path(s: &str) -> ParamPath {
        s.parse().unwrap()
    }

    #[test]
    fn linspace_hits_endpoints_exactly() {
        let a = SweepAxis::phase(path("theta2"), 33).unwrap();
        assert_eq!(a.values[0], 0.0);
        assert_eq!(a.values[32], TWO_PI);
        assert_eq!(a.values[16], PI);
        assert!((a.step() - PI / 16.0).abs() < 1e-15);
    }

    #[test]
    fn axis_validation() {
        assert!(SweepAxis::new(path("theta2"), alloc::vec![]).is_err());
        assert!(SweepAxis::new(path("theta2"), alloc::vec![0.0, 1.0, 1.0]).is_err());
        assert!(SweepAxis::new(path("theta2"), alloc::vec![0.0, f64::NAN]).is_err());
        assert!(SweepAxis::new(path("theta2"), alloc::vec![3.0, 2.0, -1.0]).is_ok());
    }

    #[test]
    fn plan_rejects_inconsistent_axes() {
        let t = preset("two-symmetric").unwrap();
        let g = FrequencyGrid::square(300.0, 8).unwrap();
        let theta3 = SweepAxis::phase(path("theta3"), 3).unwrap();
        assert!(SweepPlan::new(t.clone(), theta3, None, g.clone()).is_err());
        // delta_p2 is written by the mirror link
        let dp2 = SweepAxis::new(path("delta_p2"), alloc::vec![1.0, 2.0]).unwrap();
        assert!(SweepPlan::new(t.clone(), dp2, None, g.clone()).is_err());
        let a = SweepAxis::phase(path("theta2"), 3).unwrap();
        assert!(SweepPlan::new(t, a.clone(), Some(a), g).is_err());
    }

    #[test]
    fn mirror_link_holds_in_every_cell() {
        let t = preset("two-symmetric").unwrap();
        let g = FrequencyGrid::square(300.0, 8).unwrap();
        let dp = SweepAxis::linspace(path("delta_p1"), -20.0, 30.0, 7).unwrap();
        let th = SweepAxis::phase(path("theta2"), 5).unwrap();
        let plan = SweepPlan::new(t, dp, Some(th), g).unwrap();
        for i in 0..7 {
            for j in 0..5 {
                let c = plan.config_at(i, j).unwrap();
                assert_eq!(c.ensembles()[1].delta_p(), -c.ensembles()[0].delta_p());
            }
        }
    }

    #[test]
    fn axis_link_is_applied() {
        let base = MultiplexConfig::new(alloc::vec![crate::EnsembleShift::zero(); 2], 5.0, 0.25).unwrap();
        let t = Template::fixed(base);
        let a = SweepAxis::new(path("delta_p1"), alloc::vec![1.0, 4.0])
            .unwrap()
            .with_link(Link::Mirror { source: 0, target: 1 });
        let plan = SweepPlan::new(t, a, None, FrequencyGrid::square(300.0, 8).unwrap()).unwrap();
        assert_eq!(plan.config_at(1, 0).unwrap().ensembles()[1].delta_p(), -4.0);
    }

    #[test]
    fn null_cells_are_failures() {
        let t = preset("two-symmetric").unwrap();
        let g = FrequencyGrid::square(300.0, 32).unwrap();
        let dp = SweepAxis::new(path("delta_p1"), alloc::vec![0.0, 5.0]).unwrap();
        let th = SweepAxis::new(path("theta2"), alloc::vec![0.0, PI]).unwrap();
        let map = sweep_entropy(&t, dp, Some(th), &g).unwrap();
        assert_eq!(map.failures.len(), 1);
        let f = &map.failures[0];
        assert_eq!((f.i, f.j), (0, 1));
        assert!(f.error.is_null_kernel());
        assert_eq!(map.get(0, 1), None);
        assert!(map.get(0, 0).is_some() && map.get(1, 1).is_some());
    }
}
