//! TOML model description.
//!
//! ```toml
//! [chain]
//! springs = [2.0, 2.0, 1.0, 1.0, 0.1, 0.1]   # k_0 .. k_N, walls included
//! masses = [1.0, 1.0, 1.0, 1.0, 1.0]          # optional, default 1
//! pinning = [0.0, 0.0, 0.0, 0.0, 0.0]         # optional, default 0
//! spacing = 1.0                               # optional, default 1
//!
//! [baths]
//! hot = [1, 2]                 # 1-based bead labels
//! cold = [4, 5]
//! gamma = 1.0                  # friction of every listed bead ...
//! # frictions = [1, 1, 0, 1, 1]  # ... or one value per bead
//! temperatures = [10.0, 7.0, 3.0, 0.0]   # one per thermostated bead, or N values
//!
//! [quadrature]                 # optional; defaults follow the chain
//! points = 200000
//! scheme = "trapezoid"         # or "adaptive"
//!
//! [md]                         # optional; see `MdConfig`
//! measure_bond = 3             # bond (3, 4), 1-based
//!
//! [fk]                         # optional Frenkel-Kontorova onsite potential
//! amplitudes = [0.5, 0.5, 1.0, 1.0, 1.0]
//!
//! [effective]                  # optional temperature-dependent friction
//! slope = 0.05
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::md::{FkPotentialSpec, MdConfig};
use crate::model::{BathSpec, ChainSpec, EffectiveFrictionSpec, Model};
use crate::quadrature::{QuadratureSpec, Scheme, CUTOFF_FACTOR, DEFAULT_POINTS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    /// Bead count; inferred from `springs` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub springs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinning: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub hot: Vec<usize>,
    pub cold: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frictions: Option<Vec<f64>>,
    pub temperatures: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_intervals: Option<usize>,
}

/// `MdConfig` with a 1-based `measure_bond`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibration_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub production_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_bond: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_every: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FkSection {
    pub amplitudes: Vec<f64>,
    /// Defaults to the chain spacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveSection {
    pub slope: f64,
    /// Defaults to the bath frictions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_frictions: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub chain: ChainSection,
    pub baths: BathSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub md: Option<MdSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fk: Option<FkSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective: Option<EffectiveSection>,
}

fn to_zero_based(field: &str, labels: &[usize]) -> Result<Vec<usize>> {
    labels
        .iter()
        .map(|&l| {
            l.checked_sub(1)
                .ok_or_else(|| Error::Config(format!("{field}: bead labels start at 1")))
        })
        .collect()
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn chain_spec(&self) -> Result<ChainSpec> {
        let c = &self.chain;
        let n = c.n.unwrap_or(c.springs.len().saturating_sub(1));
        if c.springs.len() != n + 1 {
            return Err(Error::Config(format!(
                "chain.springs: expected {} values for n = {n}, found {}",
                n + 1,
                c.springs.len()
            )));
        }
        let mut chain = ChainSpec::from_springs(c.springs.clone());
        if let Some(m) = &c.masses {
            chain = chain.with_masses(m.clone());
        }
        if let Some(p) = &c.pinning {
            chain = chain.with_pinning(p.clone());
        }
        if let Some(a) = c.spacing {
            chain = chain.with_spacing(a);
        }
        Ok(chain)
    }

    pub fn bath_spec(&self, n: usize) -> Result<BathSpec> {
        let b = &self.baths;
        let hot = to_zero_based("baths.hot", &b.hot)?;
        let cold = to_zero_based("baths.cold", &b.cold)?;
        let frictions = match (&b.frictions, b.gamma) {
            (Some(f), None) => f.clone(),
            (None, Some(g)) => {
                let mut f = vec![0.0; n];
                for &i in hot.iter().chain(&cold).filter(|&&i| i < n) {
                    f[i] = g;
                }
                f
            }
            (None, None) => {
                return Err(Error::Config("baths: give either `gamma` or `frictions`".into()))
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "baths: `gamma` and `frictions` are mutually exclusive".into(),
                ))
            }
        };
        let spec = BathSpec {
            frictions,
            temperatures: vec![0.0; n],
            hot,
            cold,
        };
        let n_baths = spec.thermostated().len();
        if b.temperatures.len() == n {
            Ok(spec.with_temperatures(b.temperatures.clone()))
        } else if b.temperatures.len() == n_baths {
            Ok(spec.with_bath_temperatures(&b.temperatures))
        } else {
            Err(Error::Config(format!(
                "baths.temperatures: expected {n_baths} (one per bath) or {n} (one per bead) values, found {}",
                b.temperatures.len()
            )))
        }
    }

    /// Validated chain and baths.
    pub fn model(&self) -> Result<Model> {
        let chain = self.chain_spec()?;
        let baths = self.bath_spec(chain.n)?;
        Ok(Model::new(chain, baths)?)
    }

    pub fn quadrature_spec(&self, chain: &ChainSpec) -> Result<QuadratureSpec> {
        let q = self.quadrature.clone().unwrap_or_default();
        let mut spec = QuadratureSpec::with_points(chain, q.points.unwrap_or(DEFAULT_POINTS));
        if let Some(w) = q.omega_max {
            spec.omega_max = w;
        }
        if let Some(s) = q.scheme {
            spec.scheme = s;
        }
        if let Some(t) = q.tolerance {
            spec.tolerance = t;
        }
        if let Some(m) = q.max_intervals {
            spec.max_intervals = m;
        }
        spec.check(chain).map_err(|e| {
            Error::Config(format!(
                "{e} (cutoff must be >= {CUTOFF_FACTOR} x the largest chain frequency)"
            ))
        })?;
        Ok(spec)
    }

    pub fn md_config(&self, n: usize) -> Result<MdConfig> {
        let s = self.md.clone().unwrap_or_default();
        let d = MdConfig::default();
        let measure_bond = s
            .measure_bond
            .map(|b| {
                b.checked_sub(1)
                    .ok_or_else(|| Error::Config("md.measure_bond: bead labels start at 1".into()))
            })
            .transpose()?;
        let md = MdConfig {
            dt: s.dt.unwrap_or(d.dt),
            equilibration_steps: s.equilibration_steps.unwrap_or(d.equilibration_steps),
            production_steps: s.production_steps.unwrap_or(d.production_steps),
            realizations: s.realizations.unwrap_or(d.realizations),
            base_seed: s.base_seed.unwrap_or(d.base_seed),
            measure_bond,
            windows: s.windows.unwrap_or(d.windows),
            dump_every: s.dump_every,
        };
        md.check(n).map_err(|e| Error::Config(format!("md: {e}")))?;
        Ok(md)
    }

    pub fn fk_spec(&self, chain: &ChainSpec) -> Result<Option<FkPotentialSpec>> {
        let Some(fk) = &self.fk else {
            return Ok(None);
        };
        let spec = FkPotentialSpec {
            amplitudes: fk.amplitudes.clone(),
            period: fk.period.unwrap_or(chain.spacing),
            phase: fk.phase,
        };
        spec.check(chain.n).map_err(|e| Error::Config(format!("fk: {e}")))?;
        Ok(Some(spec))
    }

    pub fn effective_spec(&self, baths: &BathSpec) -> Option<EffectiveFrictionSpec> {
        self.effective.as_ref().map(|e| EffectiveFrictionSpec {
            base_frictions: e
                .base_frictions
                .clone()
                .unwrap_or_else(|| baths.frictions.clone()),
            slope: e.slope,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG5: &str = r#"
[chain]
springs = [2.0, 2.0, 1.0, 1.0, 0.1, 0.1]

[baths]
hot = [1, 2]
cold = [4, 5]
gamma = 1.0
temperatures = [10.0, 7.0, 3.0, 0.0]
"#;

    #[test]
    fn loads_minimal_model() {
        let cfg = Config::from_toml(FIG5).unwrap();
        let model = cfg.model().unwrap();
        assert_eq!(model.n(), 5);
        assert_eq!(model.baths().hot, vec![0, 1]);
        assert_eq!(model.baths().temperatures, vec![10.0, 7.0, 0.0, 3.0, 0.0]);
        assert_eq!(model.baths().frictions, vec![1.0, 1.0, 0.0, 1.0, 1.0]);
        let q = cfg.quadrature_spec(model.chain()).unwrap();
        assert_eq!(q.points, DEFAULT_POINTS);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = FIG5.replace("gamma = 1.0", "gamma = 1.0\ngama = 2.0");
        assert!(matches!(Config::from_toml(&text), Err(Error::Config(_))));
        let text = format!("{FIG5}\n[quadrature]\npoint = 10\n");
        assert!(matches!(Config::from_toml(&text), Err(Error::Config(_))));
    }

    #[test]
    fn zero_label_is_rejected() {
        let text = FIG5.replace("hot = [1, 2]", "hot = [0, 1]");
        let cfg = Config::from_toml(&text).unwrap();
        assert!(matches!(cfg.model(), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_model_reports_violations() {
        let text = FIG5
            .replace("cold = [4, 5]", "cold = [2, 5]")
            .replace("[10.0, 7.0, 3.0, 0.0]", "[10.0, 7.0, 0.0, 3.0, 0.0]");
        let cfg = Config::from_toml(&text).unwrap();
        assert!(matches!(cfg.model(), Err(Error::Invalid(_))));
    }

    #[test]
    fn low_cutoff_is_a_config_error() {
        let text = format!("{FIG5}\n[quadrature]\nomega_max = 1.0\n");
        let cfg = Config::from_toml(&text).unwrap();
        let chain = cfg.chain_spec().unwrap();
        assert!(matches!(cfg.quadrature_spec(&chain), Err(Error::Config(_))));
    }

    #[test]
    fn md_and_fk_sections() {
        let text = format!(
            "{FIG5}\n[md]\nmeasure_bond = 3\nrealizations = 2\n\n[fk]\namplitudes = [0.5, 0.5, 1, 1, 1]\n"
        );
        let cfg = Config::from_toml(&text).unwrap();
        let chain = cfg.chain_spec().unwrap();
        let md = cfg.md_config(chain.n).unwrap();
        assert_eq!(md.measure_bond, Some(2));
        assert_eq!(md.realizations, 2);
        let fk = cfg.fk_spec(&chain).unwrap().unwrap();
        assert_eq!(fk.period, 1.0);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = Config::from_toml(FIG5).unwrap();
        let again = Config::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
}
