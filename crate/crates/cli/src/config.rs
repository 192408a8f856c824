//! Structured-text (TOML) run configuration.
//!
//! ```toml
//! gamma3N = 5.0
//! tau = 0.25
//!
//! [grid]
//! s_min = -300.0
//! s_max = 300.0
//! i_min = -300.0
//! i_max = 300.0
//! n_s = 1024
//! n_i = 1024
//! scheme = "uniform-midpoint"   # or "gauss-legendre" with `panels = P`
//!
//! [[ensembles]]
//! delta_p = 5.0
//! delta_q = 0.0
//! theta = 0.0
//!
//! [[ensembles]]
//! delta_p = -5.0
//! theta = "pi"                  # radians, or a multiple of pi
//!
//! [sweep]                       # only read by `sweep`
//! preset = "two-symmetric"
//! fixed = { delta_p1 = 5.0 }
//! axis1 = { target = "theta2", start = 0.0, stop = "2pi", points = 33 }
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use biphoton_core::sweep::{Link, ParamPath, Preset, SweepAxis, Template};
use biphoton_core::{
    EnsembleShift, FrequencyGrid, MultiplexConfig, QuadratureScheme, DEFAULT_GAMMA3N, DEFAULT_RESOLUTION,
    DEFAULT_TAU, DEFAULT_WINDOW,
};
use serde::{Deserialize, Deserializer, Serialize};

use crate::phase::parse_phase;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("validation error: {0}")]
    Validation(String),
}

impl From<biphoton_core::Error> for ConfigError {
    fn from(e: biphoton_core::Error) -> Self {
        ConfigError::Validation(e.to_string())
    }
}

/// A real number that may be written as a multiple of π in the file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Real(pub f64);

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Float(f64),
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Float(v) => Ok(Real(v)),
            Raw::Int(v) => Ok(Real(v as f64)),
            Raw::Text(s) => parse_phase(&s).map(Real).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    #[default]
    UniformMidpoint,
    GaussLegendre,
}

fn default_gamma3n() -> f64 {
    DEFAULT_GAMMA3N
}
fn default_tau() -> f64 {
    DEFAULT_TAU
}
fn default_min() -> f64 {
    -DEFAULT_WINDOW
}
fn default_max() -> f64 {
    DEFAULT_WINDOW
}
fn default_n() -> usize {
    DEFAULT_RESOLUTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_min")]
    pub s_min: f64,
    #[serde(default = "default_max")]
    pub s_max: f64,
    #[serde(default = "default_min")]
    pub i_min: f64,
    #[serde(default = "default_max")]
    pub i_max: f64,
    #[serde(default = "default_n")]
    pub n_s: usize,
    #[serde(default = "default_n")]
    pub n_i: usize,
    #[serde(default)]
    pub scheme: SchemeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panels: Option<usize>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            s_min: default_min(),
            s_max: default_max(),
            i_min: default_min(),
            i_max: default_max(),
            n_s: default_n(),
            n_i: default_n(),
            scheme: SchemeName::UniformMidpoint,
            panels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleEntry {
    #[serde(default)]
    pub delta_p: f64,
    #[serde(default)]
    pub delta_q: f64,
    #[serde(default = "zero")]
    pub theta: Real,
}

fn zero() -> Real {
    Real(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Real>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fixed: BTreeMap<String, Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis1: Option<AxisSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<AxisSection>,
}

/// The file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "gamma3N", default = "default_gamma3n")]
    pub gamma3n: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ensembles: Vec<EnsembleEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile {
            gamma3n: DEFAULT_GAMMA3N,
            tau: DEFAULT_TAU,
            grid: GridSection::default(),
            ensembles: Vec::new(),
            sweep: None,
        }
    }
}

/// Sweep request resolved into core types. `axis1` may be left for the
/// command line to supply.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub template: Template,
    pub axis1: Option<SweepAxis>,
    pub axis2: Option<SweepAxis>,
    pub resolution: Option<usize>,
}

/// Validated contents of a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub config: MultiplexConfig,
    pub grid: FrequencyGrid,
    pub sweep: Option<SweepSpec>,
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeName::UniformMidpoint => "uniform-midpoint",
            SchemeName::GaussLegendre => "gauss-legendre",
        })
    }
}

pub fn load_config(path: &Path) -> Result<Loaded, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_config(&text, &path.display().to_string())?.resolve()
}

pub fn parse_config(text: &str, origin: &str) -> Result<ConfigFile, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.to_string(), message: e.to_string() })
}

impl ConfigFile {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn grid(&self) -> Result<FrequencyGrid, ConfigError> {
        let g = &self.grid;
        let scheme = match (g.scheme, g.panels) {
            (SchemeName::UniformMidpoint, None) => QuadratureScheme::UniformMidpoint,
            (SchemeName::UniformMidpoint, Some(_)) => {
                return Err(ConfigError::Validation("grid.panels only applies to gauss-legendre".into()))
            }
            (SchemeName::GaussLegendre, Some(panels)) => QuadratureScheme::GaussLegendre { panels },
            (SchemeName::GaussLegendre, None) => {
                return Err(ConfigError::Validation("grid.panels is required for gauss-legendre".into()))
            }
        };
        Ok(FrequencyGrid::new((g.s_min, g.s_max), (g.i_min, g.i_max), g.n_s, g.n_i, scheme)?)
    }

    fn template(&self, sweep: &SweepSection) -> Result<Template, ConfigError> {
        let mut template = match &sweep.preset {
            Some(name) => name.parse::<Preset>()?.template(self.gamma3n, self.tau)?,
            None => Template::fixed(self.explicit_config()?),
        };
        for l in &sweep.links {
            let link: Link = l.parse()?;
            template = Template::new(template.base.clone(), {
                let mut v = template.links.clone();
                v.push(link);
                v
            })?;
        }
        let fixed = sweep
            .fixed
            .iter()
            .map(|(k, v)| Ok((k.parse::<ParamPath>()?, v.0)))
            .collect::<Result<Vec<_>, ConfigError>>()?;
        let base = template.instantiate(&fixed)?;
        Ok(Template::new(base, template.links)?)
    }

    fn explicit_config(&self) -> Result<MultiplexConfig, ConfigError> {
        let ensembles = self
            .ensembles
            .iter()
            .map(|e| EnsembleShift::new(e.delta_p, e.delta_q, e.theta.0))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MultiplexConfig::new(ensembles, self.gamma3n, self.tau)?)
    }

    /// Validate and convert. The source config comes from `ensembles` when
    /// present, otherwise from the sweep preset with its `fixed` values.
    pub fn resolve(&self) -> Result<Loaded, ConfigError> {
        let grid = self.grid()?;
        let sweep = match &self.sweep {
            Some(s) => Some((s, self.template(s)?)),
            None => None,
        };
        let config = match (&sweep, self.ensembles.is_empty()) {
            (Some((_, t)), true) => t.base.clone(),
            _ => self.explicit_config()?,
        };
        let sweep = match sweep {
            None => None,
            Some((section, template)) => {
                if section.axis1.is_none() && section.axis2.is_some() {
                    return Err(ConfigError::Validation("sweep.axis2 given without sweep.axis1".into()));
                }
                Some(SweepSpec {
                    template,
                    axis1: section.axis1.as_ref().map(axis).transpose()?,
                    axis2: section.axis2.as_ref().map(axis).transpose()?,
                    resolution: section.resolution,
                })
            }
        };
        Ok(Loaded { config, grid, sweep })
    }

    /// File contents that load back to exactly `config` on `grid`.
    pub fn from_parts(config: &MultiplexConfig, grid: &FrequencyGrid) -> Self {
        let (s, i) = (grid.signal().range(), grid.idler().range());
        let (scheme, panels) = match grid.scheme() {
            QuadratureScheme::UniformMidpoint => (SchemeName::UniformMidpoint, None),
            QuadratureScheme::GaussLegendre { panels } => (SchemeName::GaussLegendre, Some(panels)),
        };
        ConfigFile {
            gamma3n: config.gamma3n(),
            tau: config.tau(),
            grid: GridSection {
                s_min: s.0,
                s_max: s.1,
                i_min: i.0,
                i_max: i.1,
                n_s: grid.signal().len(),
                n_i: grid.idler().len(),
                scheme,
                panels,
            },
            ensembles: config
                .ensembles()
                .iter()
                .map(|e| EnsembleEntry { delta_p: e.delta_p(), delta_q: e.delta_q(), theta: Real(e.theta()) })
                .collect(),
            sweep: None,
        }
    }
}

pub(crate) fn axis(section: &AxisSection) -> Result<SweepAxis, ConfigError> {
    let target: ParamPath = section.target.parse()?;
    let mut axis = match (&section.values, section.start, section.stop, section.points) {
        (Some(values), None, None, None) => SweepAxis::new(target, values.iter().map(|v| v.0).collect())?,
        (None, Some(start), Some(stop), Some(points)) => SweepAxis::linspace(target, start.0, stop.0, points)?,
        _ => {
            return Err(ConfigError::Validation(format!(
                "axis {} needs either `values` or all of `start`, `stop`, `points`",
                section.target
            )))
        }
    };
    if let Some(l) = &section.link {
        axis = axis.with_link(l.parse()?);
    }
    Ok(axis)
}

/// Write `file` as TOML.
pub fn write_config(path: &Path, file: &ConfigFile) -> std::io::Result<()> {
    std::fs::write(path, file.to_toml())
}
