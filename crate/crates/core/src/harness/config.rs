//! Flat `key = value` experiment configuration files.
//!
//! Keys are the `SimConfig` field names plus `scenario.kind`,
//! `scenario.proportions`, `scenario.theta`, `scenario.delta_c` and
//! `scenario.delta_q`. Omitted keys take their defaults; unknown keys are
//! rejected.
//!
//! ```text
//! beta = 0.2
//! iterations = 50
//! rng_seed = 7
//! scenario.kind = "proportions"
//! scenario.proportions = [0.5, 0.25, 0.25]
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EvdMode, SimConfig};
use crate::scenario::{reference_classes, ScenarioSpec, DEFAULT_DELTA_C_MAH, DEFAULT_DELTA_Q_WH};

/// A parsed configuration file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sim: SimConfig<f64>,
    pub scenario: ScenarioSpec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    num_nodes: Option<usize>,
    num_locations: Option<usize>,
    stay_min_minutes: Option<f64>,
    stay_max_minutes: Option<f64>,
    beta: Option<f64>,
    t_min_minutes: Option<f64>,
    w_el: Option<f64>,
    w_evd: Option<f64>,
    iterations: Option<usize>,
    completion_tolerance: Option<f64>,
    evd_mode: Option<EvdMode>,
    rng_seed: Option<u64>,
    energy_scale: Option<f64>,
    scenario: Option<RawScenario>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: Option<String>,
    proportions: Option<Vec<f64>>,
    theta: Option<f64>,
    delta_c: Option<f64>,
    delta_q: Option<f64>,
}

impl RawScenario {
    fn into_spec(self) -> Result<ScenarioSpec<f64>> {
        let kind = self.kind.as_deref().unwrap_or("uniform");
        let stray = |field: &str| {
            Err(Error::InvalidScenario(format!(
                "scenario.{field} does not apply to scenario.kind = \"{kind}\""
            )))
        };
        match kind {
            "uniform" => {
                if self.proportions.is_some() {
                    return stray("proportions");
                }
                if self.theta.is_some() {
                    return stray("theta");
                }
                Ok(ScenarioSpec::UniformClasses {
                    classes: reference_classes(),
                })
            }
            "proportions" => {
                if self.theta.is_some() {
                    return stray("theta");
                }
                let proportions = self.proportions.ok_or_else(|| {
                    Error::InvalidScenario("scenario.proportions is required".into())
                })?;
                Ok(ScenarioSpec::ProportionClasses {
                    classes: reference_classes(),
                    proportions,
                })
            }
            "theta" => {
                if self.proportions.is_some() {
                    return stray("proportions");
                }
                let theta = self
                    .theta
                    .ok_or_else(|| Error::InvalidScenario("scenario.theta is required".into()))?;
                Ok(ScenarioSpec::ThetaSweep {
                    theta,
                    delta_c: self.delta_c.unwrap_or(DEFAULT_DELTA_C_MAH),
                    delta_q: self.delta_q.unwrap_or(DEFAULT_DELTA_Q_WH),
                })
            }
            other => Err(Error::InvalidScenario(format!(
                "unknown scenario.kind \"{other}\" (expected uniform, proportions or theta)"
            ))),
        }
    }
}

pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|source| Error::ConfigParse {
        path: origin.to_path_buf(),
        source,
    })?;
    let d = SimConfig::<f64>::default();
    let sim = SimConfig {
        num_nodes: raw.num_nodes.unwrap_or(d.num_nodes),
        num_locations: raw.num_locations.unwrap_or(d.num_locations),
        stay_min_minutes: raw.stay_min_minutes.unwrap_or(d.stay_min_minutes),
        stay_max_minutes: raw.stay_max_minutes.unwrap_or(d.stay_max_minutes),
        beta: raw.beta.unwrap_or(d.beta),
        t_min_minutes: raw.t_min_minutes.unwrap_or(d.t_min_minutes),
        w_el: raw.w_el.unwrap_or(d.w_el),
        w_evd: raw.w_evd.unwrap_or(d.w_evd),
        iterations: raw.iterations.unwrap_or(d.iterations),
        completion_tolerance: raw.completion_tolerance.unwrap_or(d.completion_tolerance),
        evd_mode: raw.evd_mode.unwrap_or(d.evd_mode),
        rng_seed: raw.rng_seed.unwrap_or(d.rng_seed),
        energy_scale: raw.energy_scale.unwrap_or(d.energy_scale),
    };
    let scenario = raw.scenario.unwrap_or_default().into_spec()?;
    Ok(ExperimentConfig { sim, scenario })
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        parse_config(text, Path::new("test.toml"))
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn reads_every_sim_key() {
        let cfg = parse(
            r#"
num_nodes = 40
num_locations = 2
stay_min_minutes = 5
stay_max_minutes = 15.5
beta = 0.1
t_min_minutes = 2
w_el = 0.3
w_evd = 0.7
iterations = 12
completion_tolerance = 1e-5
evd_mode = "absolute"
rng_seed = 123
energy_scale = 100
"#,
        )
        .unwrap();
        let s = cfg.sim;
        assert_eq!((s.num_nodes, s.num_locations, s.iterations, s.rng_seed), (40, 2, 12, 123));
        assert_eq!((s.stay_min_minutes, s.stay_max_minutes), (5.0, 15.5));
        assert_eq!((s.beta, s.t_min_minutes, s.w_el, s.w_evd), (0.1, 2.0, 0.3, 0.7));
        assert_eq!(s.completion_tolerance, 1e-5);
        assert_eq!(s.evd_mode, EvdMode::Absolute);
        assert_eq!(s.energy_scale, 100.0);
    }

    #[test]
    fn scenario_keys() {
        let cfg = parse("scenario.kind = \"proportions\"\nscenario.proportions = [0.25, 0.25, 0.5]\n").unwrap();
        assert_eq!(cfg.scenario, ScenarioSpec::proportions([0.25, 0.25, 0.5]));
        let cfg = parse("scenario.kind = \"theta\"\nscenario.theta = 1.5\n").unwrap();
        assert_eq!(cfg.scenario, ScenarioSpec::theta(1.5));
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(matches!(parse("betta = 0.2"), Err(Error::ConfigParse { .. })));
        assert!(matches!(parse("scenario.thetta = 1"), Err(Error::ConfigParse { .. })));
    }

    #[test]
    fn scenario_field_mismatches_are_errors() {
        assert!(parse("scenario.kind = \"theta\"").is_err());
        assert!(parse("scenario.kind = \"uniform\"\nscenario.theta = 2").is_err());
        assert!(parse("scenario.kind = \"zipf\"").is_err());
    }

    #[test]
    fn invalid_values_still_parse() {
        // validation is a separate step
        let cfg = parse("beta = 1.0").unwrap();
        assert_eq!(cfg.sim.validate().unwrap_err().to_string(), "invalid configuration: beta must be < 1");
    }
}
