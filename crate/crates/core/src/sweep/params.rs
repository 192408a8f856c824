use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{EnsembleShift, Error, MultiplexConfig, Result, DEFAULT_GAMMA3N, DEFAULT_TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    DeltaP,
    DeltaQ,
    Theta,
}

impl Field {
    fn name(self) -> &'static str {
        match self {
            Field::DeltaP => "delta_p",
            Field::DeltaQ => "delta_q",
            Field::Theta => "theta",
        }
    }

    /// Phases are periodic; frequencies are not.
    pub fn is_phase(self) -> bool {
        self == Field::Theta
    }
}

/// One scalar of a config: a field of the ensemble at 0-based `ensemble`.
/// Written as `delta_p1`, `delta_q2`, `theta3` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamPath {
    pub ensemble: usize,
    pub field: Field,
}

impl ParamPath {
    pub fn new(ensemble: usize, field: Field) -> Self {
        ParamPath { ensemble, field }
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.field.name(), self.ensemble + 1)
    }
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        for field in [Field::DeltaP, Field::DeltaQ, Field::Theta] {
            if let Some(rest) = s.strip_prefix(field.name()) {
                let rest = rest.trim_start_matches('_');
                if let Ok(index) = rest.parse::<usize>() {
                    if index >= 1 {
                        return Ok(ParamPath::new(index - 1, field));
                    }
                }
            }
        }
        Err(Error::InvalidAxis(format!("unrecognized parameter `{s}` (expected e.g. delta_p1, theta2)")))
    }
}

/// Rule tying one parameter to another after assignments are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    /// `delta_p` of `target` is set to minus `delta_p` of `source`
    /// (0-based ensemble indices).
    Mirror { source: usize, target: usize },
}

impl Link {
    fn apply(&self, ensembles: &mut [EnsembleShift]) -> Result<()> {
        match *self {
            Link::Mirror { source, target } => {
                let (Some(src), Some(dst)) = (ensembles.get(source), ensembles.get(target)) else {
                    return Err(Error::InvalidAxis(format!("mirror link {self} refers to a missing ensemble")));
                };
                ensembles[target] = EnsembleShift::new(-src.delta_p(), dst.delta_q(), dst.theta())?;
                Ok(())
            }
        }
    }

    pub(crate) fn max_index(&self) -> usize {
        match *self {
            Link::Mirror { source, target } => source.max(target),
        }
    }

    /// Parameter written by this link.
    pub fn writes(&self) -> ParamPath {
        match *self {
            Link::Mirror { target, .. } => ParamPath::new(target, Field::DeltaP),
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Link::Mirror { source, target } => write!(f, "mirror:{}:{}", source + 1, target + 1),
        }
    }
}

impl FromStr for Link {
    type Err = Error;

    /// `mirror:SOURCE:TARGET` with 1-based ensemble numbers.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidAxis(format!("unrecognized link `{s}` (expected mirror:SOURCE:TARGET)"));
        let mut parts = s.trim().split(':');
        if parts.next() != Some("mirror") {
            return Err(bad());
        }
        let mut index = || -> Result<usize> {
            match parts.next().and_then(|p| p.parse::<usize>().ok()) {
                Some(i) if i >= 1 => Ok(i - 1),
                _ => Err(bad()),
            }
        };
        let (source, target) = (index()?, index()?);
        if parts.next().is_some() || source == target {
            return Err(bad());
        }
        Ok(Link::Mirror { source, target })
    }
}

/// A config with free parameters filled in per sweep cell, plus the links
/// that keep dependent parameters consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub base: MultiplexConfig,
    pub links: Vec<Link>,
}

impl Template {
    pub fn new(base: MultiplexConfig, links: Vec<Link>) -> Result<Self> {
        for l in &links {
            if l.max_index() >= base.len() {
                return Err(Error::InvalidAxis(format!("link {l} refers to a missing ensemble")));
            }
        }
        Ok(Template { base, links })
    }

    /// A template without links.
    pub fn fixed(base: MultiplexConfig) -> Self {
        Template { base, links: Vec::new() }
    }

    /// Apply `assignments` in order, then every template link, then
    /// `extra_links`.
    pub fn instantiate_with(&self, assignments: &[(ParamPath, f64)], extra_links: &[Link]) -> Result<MultiplexConfig> {
        let mut ensembles: Vec<EnsembleShift> = self.base.ensembles().to_vec();
        for &(path, value) in assignments {
            let Some(e) = ensembles.get(path.ensemble) else {
                return Err(Error::InvalidAxis(format!(
                    "{path} refers to ensemble {} but the template has {}",
                    path.ensemble + 1,
                    self.base.len()
                )));
            };
            let (mut p, mut q, mut t) = (e.delta_p(), e.delta_q(), e.theta());
            match path.field {
                Field::DeltaP => p = value,
                Field::DeltaQ => q = value,
                Field::Theta => t = value,
            }
            ensembles[path.ensemble] = EnsembleShift::new(p, q, t)?;
        }
        for l in self.links.iter().chain(extra_links) {
            l.apply(&mut ensembles)?;
        }
        MultiplexConfig::new(ensembles, self.base.gamma3n(), self.base.tau())
    }

    pub fn instantiate(&self, assignments: &[(ParamPath, f64)]) -> Result<MultiplexConfig> {
        self.instantiate_with(assignments, &[])
    }
}

/// Symmetric multiplexing configurations with opposite idler shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Ensembles `(δp₁, θ=0)` and `(-δp₁, θ₂)`; free `delta_p1`, `theta2`.
    TwoSymmetric,
    /// Ensembles `(δp₁, θ₁)`, `(-δp₁, θ₂)` and an unshifted phase reference
    /// `(0, 0)`; free `delta_p1`, `theta1`, `theta2`.
    ThreeSymmetric,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::TwoSymmetric => "two-symmetric",
            Preset::ThreeSymmetric => "three-symmetric",
        }
    }

    /// Template with all free parameters at zero.
    pub fn template(self, gamma3n: f64, tau: f64) -> Result<Template> {
        let n = match self {
            Preset::TwoSymmetric => 2,
            Preset::ThreeSymmetric => 3,
        };
        let base = MultiplexConfig::new(alloc::vec![EnsembleShift::zero(); n], gamma3n, tau)?;
        Template::new(base, alloc::vec![Link::Mirror { source: 0, target: 1 }])
    }

    pub fn free_parameters(self) -> &'static [&'static str] {
        match self {
            Preset::TwoSymmetric => &["delta_p1", "theta2"],
            Preset::ThreeSymmetric => &["delta_p1", "theta1", "theta2"],
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "two-symmetric" => Ok(Preset::TwoSymmetric),
            "three-symmetric" => Ok(Preset::ThreeSymmetric),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

/// Template for a named preset at the default Γ₃ᴺ and τ.
pub fn preset(name: &str) -> Result<Template> {
    name.parse::<Preset>()?.template(DEFAULT_GAMMA3N, DEFAULT_TAU)
}

pub(crate) fn p(ensemble: usize, field: Field) -> ParamPath {
    ParamPath::new(ensemble, field)
}

/// Two-ensemble symmetric source at the default Γ₃ᴺ and τ.
pub fn two_symmetric(delta_p1: f64, theta2: f64) -> Result<MultiplexConfig> {
    Preset::TwoSymmetric
        .template(DEFAULT_GAMMA3N, DEFAULT_TAU)?
        .instantiate(&[(p(0, Field::DeltaP), delta_p1), (p(1, Field::Theta), theta2)])
}

/// Three-ensemble symmetric source at the default Γ₃ᴺ and τ.
pub fn three_symmetric(delta_p1: f64, theta1: f64, theta2: f64) -> Result<MultiplexConfig> {
    Preset::ThreeSymmetric.template(DEFAULT_GAMMA3N, DEFAULT_TAU)?.instantiate(&[
        (p(0, Field::DeltaP), delta_p1),
        (p(0, Field::Theta), theta1),
        (p(1, Field::Theta), theta2),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn path_round_trip() {
        for s in ["delta_p1", "delta_q2", "theta3", "theta12"] {
            assert_eq!(s.parse::<ParamPath>().unwrap().to_string(), s);
        }
        assert_eq!("delta_p_2".parse::<ParamPath>().unwrap(), p(1, Field::DeltaP));
        for bad in ["theta0", "phi1", "delta_p", ""] {
            assert!(bad.parse::<ParamPath>().is_err(), "{bad}");
        }
    }

    #[test]
    fn link_parse() {
        assert_eq!("mirror:1:2".parse::<Link>().unwrap(), Link::Mirror { source: 0, target: 1 });
        assert_eq!(Link::Mirror { source: 2, target: 0 }.to_string(), "mirror:3:1");
        for bad in ["mirror:1:1", "mirror:1", "copy:1:2", "mirror:0:2", "mirror:1:2:3"] {
            assert!(bad.parse::<Link>().is_err(), "{bad}");
        }
    }

    #[test]
    fn unknown_preset() {
        assert_eq!(preset("four-symmetric").unwrap_err(), Error::UnknownPreset("four-symmetric".into()));
    }

    #[test]
    fn two_symmetric_layout() {
        let c = two_symmetric(5.0, PI).unwrap();
        let e = c.ensembles();
        assert_eq!(c.len(), 2);
        assert_eq!((e[0].delta_p(), e[0].delta_q(), e[0].theta()), (5.0, 0.0, 0.0));
        assert_eq!((e[1].delta_p(), e[1].delta_q(), e[1].theta()), (-5.0, 0.0, PI));
        assert_eq!((c.gamma3n(), c.tau()), (5.0, 0.25));
    }

    #[test]
    fn three_symmetric_layout() {
        let c = three_symmetric(6.0, 4.0 * PI / 3.0, 2.0 * PI / 3.0).unwrap();
        let e = c.ensembles();
        assert_eq!((e[0].delta_p(), e[0].theta()), (6.0, 4.0 * PI / 3.0));
        assert_eq!((e[1].delta_p(), e[1].theta()), (-6.0, 2.0 * PI / 3.0));
        assert_eq!((e[2].delta_p(), e[2].theta()), (0.0, 0.0));
        assert!(e.iter().all(|x| x.delta_q() == 0.0));
    }

    #[test]
    fn assignment_to_missing_ensemble_fails() {
        let t = preset("two-symmetric").unwrap();
        assert!(matches!(t.instantiate(&[(p(2, Field::Theta), 1.0)]), Err(Error::InvalidAxis(_))));
        let base = MultiplexConfig::single(5.0, 0.25).unwrap();
        assert!(Template::new(base, alloc::vec![Link::Mirror { source: 0, target: 1 }]).is_err());
    }
}
