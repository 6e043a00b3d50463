//! JSON run configuration.
//!
//! Momenta in the file (`k`, `q_range`, absolute widths) are measured in the
//! unit picked by `k_unit`:
//!
//! * `"total_mass"`: `M * alpha` (total mass times strength, hbar = 1),
//! * `"reduced_mass"`: `mu_red * alpha`, the scale the amplitudes depend on,
//! * `"absolute"`: raw natural units.
//!
//! `"total_mass"` is the default whenever the potential has a strength; hard
//! core and free runs default to `"absolute"`. Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::amplitudes::{AmplitudeModel, Scatterer};
use crate::error::{Error, Result};
use crate::kinematics::MassPartition;
use crate::purity::EngineSettings;
use crate::wavefunction::GaussianInState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub masses: Option<MassSpec>,
    #[serde(default)]
    pub sigmas: Option<SigmaSpec>,
    /// Central momentum for single-point runs.
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub k_unit: Option<MomentumUnit>,
    #[serde(default)]
    pub sweep: Option<SweepAxis>,
    /// Relative momenta tabulated by `amplitudes`.
    #[serde(default)]
    pub q_range: Option<Samples>,
    #[serde(default)]
    pub engine: EngineSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    None,
    HardCore,
    Delta {
        alpha: f64,
    },
    DoubleDelta {
        alpha: f64,
        /// Half-separation of the two deltas.
        a: f64,
        #[serde(default)]
        a_unit: LengthUnit,
    },
    Composite {
        scatterers: Vec<ScattererSpec>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererSpec {
    pub position: f64,
    pub alpha: f64,
}

/// Unit of the double-delta half-separation: `a` is given in multiples of
/// `1 / (M alpha)` (`total_mass`), `1 / (mu_red alpha)` (`reduced_mass`) or in
/// natural units (`absolute`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    #[default]
    Absolute,
    TotalMass,
    ReducedMass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumUnit {
    Absolute,
    TotalMass,
    ReducedMass,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MassSpec {
    Masses(Masses),
    Fraction(Fraction),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Masses {
    pub m1: f64,
    pub m2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fraction {
    pub mu1: f64,
    #[serde(default = "one")]
    pub total: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaSpec {
    /// Widths proportional to the central momentum, `sigma_i = k * ratio_i`.
    RelativeToK(RelativeWidths),
    /// Fixed widths in the configured momentum unit.
    Fixed(FixedWidths),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeWidths {
    pub sigma1_over_k: f64,
    pub sigma2_over_k: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedWidths {
    pub sigma1: f64,
    pub sigma2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Samples {
    Values(Values),
    Linspace(Linspace),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Values {
    pub values: Vec<f64>,
}

/// `points` evenly spaced values from `min` to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Samples {
    pub fn values(&self, field: &str) -> Result<Vec<f64>> {
        let v = match self {
            Samples::Values(Values { values }) => values.clone(),
            Samples::Linspace(Linspace { min, max, points }) => {
                if *points == 0 {
                    return Err(Error::config(field, "points must be at least 1"));
                }
                if !(min.is_finite() && max.is_finite() && max >= min) {
                    return Err(Error::config(field, format!("need finite min <= max, got [{min}, {max}]")));
                }
                if *points == 1 {
                    vec![*min]
                } else {
                    let step = (max - min) / (*points - 1) as f64;
                    (0..*points).map(|i| min + step * i as f64).collect()
                }
            }
        };
        if v.is_empty() {
            return Err(Error::config(field, "range is empty"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::config(field, "values must be finite"));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepAxis {
    /// Central momentum in `k_unit`.
    K { k: Samples },
    /// Mass fraction times width ratio `c = sigma2 / sigma1`.
    Mu1C { mu1: Samples, c: Samples },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSpec {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_n_base")]
    pub n_base: usize,
    #[serde(default = "default_n_cap")]
    pub n_cap: usize,
    /// Fail with exit code 3 instead of flagging non-converged points.
    #[serde(default)]
    pub strict: bool,
}

fn default_rel_tol() -> f64 {
    EngineSettings::default().rel_tol
}

fn default_n_base() -> usize {
    EngineSettings::default().n_base
}

fn default_n_cap() -> usize {
    EngineSettings::default().n_cap
}

impl Default for EngineSpec {
    fn default() -> Self {
        Self { rel_tol: default_rel_tol(), n_base: default_n_base(), n_cap: default_n_cap(), strict: false }
    }
}

impl EngineSpec {
    pub fn settings(&self) -> Result<EngineSettings> {
        let s = EngineSettings { rel_tol: self.rel_tol, n_base: self.n_base, n_cap: self.n_cap, ..Default::default() };
        s.validate().map_err(|e| Error::config("engine", e.to_string()))?;
        Ok(s)
    }
}

/// A parsed configuration plus the hash of its source text.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: Config,
    pub hash: String,
}

impl LoadedConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: Config = serde_json::from_str(text)
            .map_err(|e| Error::config(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        let hash = hex::encode(Sha256::digest(text.as_bytes()));
        Ok(Self { config, hash })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// One physical parameter point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub k: f64,
    pub masses: MassPartition,
    pub sigma1: f64,
    pub sigma2: f64,
}

impl Point {
    pub fn state(&self) -> Result<GaussianInState> {
        GaussianInState::new(self.k, self.sigma1, self.sigma2, self.masses)
    }
}

impl Config {
    pub fn masses(&self) -> Result<MassPartition> {
        let spec = self.masses.ok_or_else(|| Error::config("masses", "missing"))?;
        let mp = match spec {
            MassSpec::Masses(Masses { m1, m2 }) => MassPartition::from_masses(m1, m2),
            MassSpec::Fraction(Fraction { mu1, total }) => MassPartition::from_fraction(mu1, total),
        };
        mp.map_err(|e| Error::config("masses", e.to_string()))
    }

    pub fn potential_spec(&self) -> Result<&PotentialSpec> {
        self.potential.as_ref().ok_or_else(|| Error::config("potential", "missing"))
    }

    /// Amplitude model for the configured potential with these masses.
    pub fn model(&self, masses: MassPartition) -> Result<AmplitudeModel> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::config(field, format!("must be positive and finite, got {v}")))
            }
        };
        let model = match self.potential_spec()? {
            PotentialSpec::None => Ok(AmplitudeModel::free(masses)),
            PotentialSpec::HardCore => Ok(AmplitudeModel::hard_core(masses)),
            PotentialSpec::Delta { alpha } => AmplitudeModel::delta(positive("potential.alpha", *alpha)?, masses),
            PotentialSpec::DoubleDelta { alpha, a, a_unit } => {
                let alpha = positive("potential.alpha", *alpha)?;
                let a = positive("potential.a", *a)?;
                let length = match a_unit {
                    LengthUnit::Absolute => 1.0,
                    LengthUnit::TotalMass => 1.0 / (masses.total() * alpha),
                    LengthUnit::ReducedMass => 1.0 / (masses.reduced() * alpha),
                };
                AmplitudeModel::double_delta(alpha, a * length, masses)
            }
            PotentialSpec::Composite { scatterers } => AmplitudeModel::composite(
                scatterers.iter().map(|s| Scatterer { position: s.position, alpha: s.alpha }).collect(),
                masses,
            ),
        };
        model.map_err(|e| Error::config("potential", e.to_string()))
    }

    fn strength(&self) -> Option<f64> {
        match self.potential.as_ref()? {
            PotentialSpec::Delta { alpha } | PotentialSpec::DoubleDelta { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }

    pub fn unit(&self) -> Result<MomentumUnit> {
        match (self.k_unit, self.strength()) {
            (Some(MomentumUnit::Absolute), _) => Ok(MomentumUnit::Absolute),
            (Some(u), Some(_)) => Ok(u),
            (Some(u), None) => Err(Error::config("k_unit", format!("{u:?} units need a delta or double delta potential"))),
            (None, Some(_)) => Ok(MomentumUnit::TotalMass),
            (None, None) => Ok(MomentumUnit::Absolute),
        }
    }

    /// Multiply a momentum in `k_unit` by this to get natural units.
    pub fn momentum_scale(&self, masses: &MassPartition) -> Result<f64> {
        let alpha = self.strength();
        Ok(match self.unit()? {
            MomentumUnit::Absolute => 1.0,
            MomentumUnit::TotalMass => masses.total() * alpha.unwrap(),
            MomentumUnit::ReducedMass => masses.reduced() * alpha.unwrap(),
        })
    }

    pub fn settings(&self) -> Result<EngineSettings> {
        self.engine.settings()
    }

    fn sigma_spec(&self) -> Result<SigmaSpec> {
        let s = self.sigmas.ok_or_else(|| Error::config("sigmas", "missing"))?;
        let (a, b) = match s {
            SigmaSpec::RelativeToK(RelativeWidths { sigma1_over_k, sigma2_over_k }) => (sigma1_over_k, sigma2_over_k),
            SigmaSpec::Fixed(FixedWidths { sigma1, sigma2 }) => (sigma1, sigma2),
        };
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::config("sigmas", "widths must be positive and finite"));
        }
        Ok(s)
    }

    fn point(&self, k_unit: f64, masses: MassPartition, c_override: Option<f64>) -> Result<Point> {
        if k_unit <= 0.0 || !k_unit.is_finite() {
            return Err(Error::config("k", format!("must be positive, got {k_unit}")));
        }
        let scale = self.momentum_scale(&masses)?;
        let k = k_unit * scale;
        let (s1, s2) = match self.sigma_spec()? {
            SigmaSpec::RelativeToK(RelativeWidths { sigma1_over_k, sigma2_over_k }) => (k * sigma1_over_k, k * sigma2_over_k),
            SigmaSpec::Fixed(FixedWidths { sigma1, sigma2 }) => (sigma1 * scale, sigma2 * scale),
        };
        let s2 = c_override.map_or(s2, |c| c * s1);
        Ok(Point { k, masses, sigma1: s1, sigma2: s2 })
    }

    /// The single parameter point used by `purity`.
    pub fn single_point(&self) -> Result<Point> {
        let k = self.k.ok_or_else(|| Error::config("k", "missing"))?;
        let p = self.point(k, self.masses()?, None)?;
        p.state().map_err(|e| Error::config("sigmas", e.to_string()))?;
        Ok(p)
    }

    /// Points of the `sweep` axis in axis order.
    pub fn sweep_points(&self) -> Result<Vec<Point>> {
        match self.sweep.as_ref().ok_or_else(|| Error::config("sweep", "missing"))? {
            SweepAxis::K { k } => {
                let masses = self.masses()?;
                k.values("sweep.k")?.into_iter().map(|k| self.point(k, masses, None)).collect()
            }
            SweepAxis::Mu1C { mu1, c } => {
                let k = self.k.ok_or_else(|| Error::config("k", "a mu1_c sweep needs a fixed k"))?;
                let total = match self.masses {
                    Some(MassSpec::Fraction(Fraction { total, .. })) => total,
                    Some(MassSpec::Masses(Masses { m1, m2 })) => m1 + m2,
                    None => 1.0,
                };
                let mut out = Vec::new();
                for mu in mu1.values("sweep.mu1")? {
                    let masses = MassPartition::from_fraction(mu, total).map_err(|e| Error::config("sweep.mu1", e.to_string()))?;
                    for cc in c.values("sweep.c")? {
                        if cc <= 0.0 {
                            return Err(Error::config("sweep.c", "ratios must be positive"));
                        }
                        out.push(self.point(k, masses, Some(cc))?);
                    }
                }
                Ok(out)
            }
        }
    }

    /// `(mu1, c)` grid for `reflectmap`.
    pub fn reflectmap_grid(&self) -> Result<Vec<(f64, f64)>> {
        match self.sweep.as_ref() {
            Some(SweepAxis::Mu1C { mu1, c }) => {
                let mus = mu1.values("sweep.mu1")?;
                let cs = c.values("sweep.c")?;
                if let Some(m) = mus.iter().find(|m| !(**m > 0.0 && **m < 1.0)) {
                    return Err(Error::config("sweep.mu1", format!("values must lie in (0, 1), got {m}")));
                }
                if let Some(x) = cs.iter().find(|x| **x <= 0.0) {
                    return Err(Error::config("sweep.c", format!("values must be positive, got {x}")));
                }
                Ok(mus.iter().flat_map(|&m| cs.iter().map(move |&x| (m, x))).collect())
            }
            _ => Err(Error::config("sweep", "reflectmap needs a mu1_c axis")),
        }
    }

    /// Relative momenta (natural units) for `amplitudes`.
    pub fn q_values(&self, masses: &MassPartition) -> Result<Vec<f64>> {
        let q = self.q_range.as_ref().ok_or_else(|| Error::config("q_range", "missing"))?;
        let scale = self.momentum_scale(masses)?;
        let v = q.values("q_range")?;
        if let Some(x) = v.iter().find(|x| **x <= 0.0) {
            return Err(Error::config("q_range", format!("relative momenta must be positive, got {x}")));
        }
        Ok(v.into_iter().map(|x| x * scale).collect())
    }
}
