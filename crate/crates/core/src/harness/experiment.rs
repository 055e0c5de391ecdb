//! Batch execution of one or more protocols and artifact emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{load_config, ExperimentConfig};
use super::output::{write_json, write_runs_csv_file, ProtocolSummary, Summary};
use crate::engine::{run_batch, run_batch_sequential, RunResult};
use crate::error::{Error, Result};
use crate::model::SimConfig;
use crate::protocols::ProtocolKind;
use crate::rng::repetition_seed;
use crate::scenario::ScenarioSpec;

pub const DEFAULT_REPETITIONS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub protocols: Vec<ProtocolKind>,
    /// Falls back to the config's `rng_seed`.
    pub base_seed: Option<u64>,
    pub repetitions: usize,
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            protocols: ProtocolKind::ALL.to_vec(),
            base_seed: None,
            repetitions: DEFAULT_REPETITIONS,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: SimConfig<f64>,
    pub scenario: ScenarioSpec<f64>,
    pub scenario_label: String,
    pub protocols: Vec<ProtocolKind>,
    pub base_seed: u64,
    pub repetitions: usize,
    pub seeds: Vec<u64>,
}

/// Loads `config_path` and runs every protocol in `protocols` with the
/// default repetition count, writing artifacts into `output_dir`.
pub fn run_experiment(
    config_path: impl AsRef<Path>,
    protocols: &[ProtocolKind],
    output_dir: impl AsRef<Path>,
) -> Result<Summary> {
    let exp = load_config(config_path)?;
    let opts = RunOptions {
        protocols: protocols.to_vec(),
        ..Default::default()
    };
    run_experiment_with(&exp, &opts, output_dir.as_ref())
}

/// Runs all batches, then writes `<protocol>.csv`, `summary.json` and
/// `manifest.json` into `out`. Existing files are replaced.
pub fn run_experiment_with(exp: &ExperimentConfig, opts: &RunOptions, out: &Path) -> Result<Summary> {
    exp.sim.validate()?;
    if opts.protocols.is_empty() {
        return Err(Error::InvalidConfig(vec!["no protocols selected".into()]));
    }
    let base_seed = opts.base_seed.unwrap_or(exp.sim.rng_seed);
    let batches = run_protocols(exp, &opts.protocols, base_seed, opts.repetitions, opts.parallel)?;

    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut summary = Summary::new();
    for (protocol, runs) in opts.protocols.iter().zip(&batches) {
        write_runs_csv_file(&out.join(format!("{}.csv", protocol.name())), runs)?;
        summary.insert(protocol.name().to_owned(), ProtocolSummary::from_runs(runs));
    }
    write_json(&out.join("summary.json"), &summary)?;

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        config: exp.sim.clone(),
        scenario: exp.scenario.clone(),
        scenario_label: exp.scenario.label(),
        protocols: opts.protocols.clone(),
        base_seed,
        repetitions: opts.repetitions,
        seeds: (0..opts.repetitions as u64).map(|k| repetition_seed(base_seed, k)).collect(),
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(summary)
}

fn run_protocols(
    exp: &ExperimentConfig,
    protocols: &[ProtocolKind],
    base_seed: u64,
    repetitions: usize,
    parallel: bool,
) -> Result<Vec<Vec<RunResult<f64>>>> {
    let batch = |&p: &ProtocolKind| {
        if parallel {
            run_batch(&exp.sim, &exp.scenario, p, base_seed, repetitions)
        } else {
            run_batch_sequential(&exp.sim, &exp.scenario, p, base_seed, repetitions)
        }
    };
    if parallel {
        protocols.par_iter().map(batch).collect()
    } else {
        protocols.iter().map(batch).collect()
    }
}

/// Runs the six heterogeneity scenarios, each into `out/<label>/`, using
/// `base` for every non-scenario setting.
pub fn sweep(base: &SimConfig<f64>, opts: &RunOptions, out: &Path) -> Result<BTreeMap<String, Summary>> {
    let mut all = BTreeMap::new();
    for scenario in ScenarioSpec::sweep_set() {
        let label = scenario.label();
        let exp = ExperimentConfig {
            sim: base.clone(),
            scenario,
        };
        let summary = run_experiment_with(&exp, opts, &out.join(&label))?;
        all.insert(label, summary);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            sim: SimConfig {
                num_nodes: 12,
                num_locations: 2,
                iterations: 4,
                ..Default::default()
            },
            scenario: ScenarioSpec::default(),
        }
    }

    fn opts(reps: usize) -> RunOptions {
        RunOptions {
            protocols: vec![ProtocolKind::HetWet, ProtocolKind::Poa],
            base_seed: Some(9),
            repetitions: reps,
            parallel: true,
        }
    }

    #[test]
    fn writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run_experiment_with(&small(), &opts(3), dir.path()).unwrap();
        assert_eq!(summary.keys().collect::<Vec<_>>(), ["hetwet", "poa"]);
        for name in ["hetwet.csv", "poa.csv", "summary.json", "manifest.json"] {
            assert!(dir.path().join(name).is_file(), "{name}");
        }
        let csv = fs::read_to_string(dir.path().join("poa.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 3 * 5);
        let manifest: Manifest =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest.seeds.len(), 3);
        assert_eq!(manifest.base_seed, 9);
    }

    #[test]
    fn rerun_replaces_files() {
        let dir = tempfile::tempdir().unwrap();
        run_experiment_with(&small(), &opts(3), dir.path()).unwrap();
        run_experiment_with(&small(), &opts(2), dir.path()).unwrap();
        let csv = fs::read_to_string(dir.path().join("hetwet.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 2 * 5);
    }

    #[test]
    fn invalid_config_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut exp = small();
        exp.sim.beta = 1.5;
        let out = dir.path().join("out");
        assert!(run_experiment_with(&exp, &opts(1), &out).is_err());
        assert!(!out.exists());
    }

    #[test]
    fn seed_defaults_to_config() {
        let dir = tempfile::tempdir().unwrap();
        let mut exp = small();
        exp.sim.rng_seed = 77;
        let o = RunOptions {
            base_seed: None,
            ..opts(1)
        };
        run_experiment_with(&exp, &o, dir.path()).unwrap();
        let manifest: Manifest =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest.base_seed, 77);
    }
}
