//! Seeded simulation runs: initialization, the iteration loop and batches.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charging::target_balance_level;
use crate::error::Result;
use crate::metrics::{balanced_count, total_energy, variation_distance, MetricsRow};
use crate::mobility::{derive_contacts, place_nodes, IterationPlacement};
use crate::model::{Contact, NodeId, NodeState, SimConfig};
use crate::protocols::{MatchingOutcome, ProtocolKind, StepContext};
use crate::rng::{repetition_seed, stream_rng, SimRng, Stream};
use crate::scalar::Scalar;
use crate::scenario::{assign_profiles, scenario_classes, ScenarioSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult<S> {
    pub run_id: usize,
    pub protocol: ProtocolKind,
    pub seed: u64,
    /// Row 0 is the untouched initial state, followed by one row per
    /// iteration.
    pub rows: Vec<MetricsRow<S>>,
    pub final_energies: Vec<S>,
}

impl<S: Scalar> RunResult<S> {
    pub fn final_row(&self) -> &MetricsRow<S> {
        self.rows.last().expect("run has a baseline row")
    }
}

/// `cfg.num_nodes` nodes with scenario profiles and energies i.i.d. uniform
/// over `[0, energy_scale]` (on the energy grid), all `Incomplete`.
pub fn initialize<S: Scalar, R: Rng + ?Sized>(
    cfg: &SimConfig<S>,
    scenario: &ScenarioSpec<S>,
    rng: &mut R,
) -> Result<Vec<NodeState<S>>> {
    let classes = scenario_classes(scenario)?;
    let profiles = assign_profiles(&classes, cfg.num_nodes, rng);
    Ok(profiles
        .into_iter()
        .enumerate()
        .map(|(i, profile)| {
            let energy = (cfg.energy_scale * S::lit(rng.gen::<f64>())).quantize_down();
            NodeState::new(NodeId(i), profile, energy)
        })
        .collect())
}

/// Everything that happened in one iteration.
#[derive(Clone, Debug)]
pub struct StepReport<S> {
    pub placement: IterationPlacement<S>,
    pub contacts: Vec<Contact<S>>,
    pub outcome: MatchingOutcome<S>,
    pub row: MetricsRow<S>,
}

/// A single run that can be advanced one iteration at a time.
#[derive(Clone, Debug)]
pub struct Simulation<S> {
    cfg: SimConfig<S>,
    protocol: ProtocolKind,
    seed: u64,
    e_star: S,
    nodes: Vec<NodeState<S>>,
    iteration: usize,
    cumulative_loss: S,
}

impl<S: Scalar> Simulation<S> {
    pub fn new(
        cfg: &SimConfig<S>,
        scenario: &ScenarioSpec<S>,
        protocol: ProtocolKind,
        seed: u64,
    ) -> Result<Self> {
        cfg.validate()?;
        let e_star = target_balance_level(cfg.beta, cfg.energy_scale)?;
        let nodes = initialize(cfg, scenario, &mut stream_rng(seed, Stream::Init, 0))?;
        Ok(Self {
            cfg: cfg.clone(),
            protocol,
            seed,
            e_star,
            nodes,
            iteration: 0,
            cumulative_loss: S::zero(),
        })
    }

    pub fn nodes(&self) -> &[NodeState<S>] {
        &self.nodes
    }

    pub fn e_star(&self) -> S {
        self.e_star
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn cumulative_loss(&self) -> S {
        self.cumulative_loss
    }

    pub fn metrics(&self, meetings: usize) -> MetricsRow<S> {
        MetricsRow {
            iteration: self.iteration,
            total_energy: total_energy(&self.nodes),
            // an all-empty network is trivially uniform
            variation_distance: variation_distance(&self.nodes).unwrap_or(S::zero()),
            meetings,
            balanced_count: balanced_count(&self.nodes),
            cumulative_loss: self.cumulative_loss,
        }
    }

    /// Advances one iteration: place nodes, derive contacts, run the
    /// protocol and record metrics.
    pub fn step(&mut self) -> StepReport<S> {
        self.iteration += 1;
        let t = self.iteration;
        let placement = place_nodes(
            &mut stream_rng(self.seed, Stream::Mobility, t as u64),
            &self.cfg,
            t,
        );
        for (node, &(loc, stay)) in self.nodes.iter_mut().zip(&placement.assignments) {
            node.location = loc;
            node.stay_remaining = stay;
        }
        let contacts = derive_contacts(&placement, self.cfg.t_min_minutes);
        let ctx = StepContext {
            cfg: &self.cfg,
            e_star: self.e_star,
            iteration: t,
        };
        let mut rng: SimRng = stream_rng(self.seed, Stream::Protocol, t as u64);
        let outcome = self.protocol.step(&mut self.nodes, &contacts, &ctx, &mut rng);
        self.cumulative_loss += outcome.total_loss();
        let row = self.metrics(outcome.meetings_count);
        StepReport {
            placement,
            contacts,
            outcome,
            row,
        }
    }

    fn into_result(self, run_id: usize, rows: Vec<MetricsRow<S>>) -> RunResult<S> {
        RunResult {
            run_id,
            protocol: self.protocol,
            seed: self.seed,
            rows,
            final_energies: self.nodes.into_iter().map(|n| n.energy).collect(),
        }
    }
}

pub fn run<S: Scalar>(
    cfg: &SimConfig<S>,
    scenario: &ScenarioSpec<S>,
    protocol: ProtocolKind,
    seed: u64,
) -> Result<RunResult<S>> {
    run_with_id(cfg, scenario, protocol, seed, 0)
}

fn run_with_id<S: Scalar>(
    cfg: &SimConfig<S>,
    scenario: &ScenarioSpec<S>,
    protocol: ProtocolKind,
    seed: u64,
    run_id: usize,
) -> Result<RunResult<S>> {
    let mut sim = Simulation::new(cfg, scenario, protocol, seed)?;
    let mut rows = Vec::with_capacity(cfg.iterations + 1);
    rows.push(sim.metrics(0));
    for _ in 0..cfg.iterations {
        rows.push(sim.step().row);
    }
    Ok(sim.into_result(run_id, rows))
}

/// `repetitions` runs; repetition `k` uses `repetition_seed(base_seed, k)`.
/// Runs execute in parallel and are returned ordered by `k`.
pub fn run_batch<S: Scalar>(
    cfg: &SimConfig<S>,
    scenario: &ScenarioSpec<S>,
    protocol: ProtocolKind,
    base_seed: u64,
    repetitions: usize,
) -> Result<Vec<RunResult<S>>> {
    (0..repetitions)
        .into_par_iter()
        .map(|k| run_with_id(cfg, scenario, protocol, repetition_seed(base_seed, k as u64), k))
        .collect()
}

/// Single-threaded equivalent of [`run_batch`].
pub fn run_batch_sequential<S: Scalar>(
    cfg: &SimConfig<S>,
    scenario: &ScenarioSpec<S>,
    protocol: ProtocolKind,
    base_seed: u64,
    repetitions: usize,
) -> Result<Vec<RunResult<S>>> {
    (0..repetitions)
        .map(|k| run_with_id(cfg, scenario, protocol, repetition_seed(base_seed, k as u64), k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::Status;

    fn small_cfg() -> SimConfig<f64> {
        SimConfig {
            num_nodes: 30,
            num_locations: 3,
            iterations: 10,
            ..Default::default()
        }
    }

    #[test]
    fn initialization_counts_and_determinism() {
        let cfg = SimConfig::<f64>::default();
        let a = initialize(&cfg, &ScenarioSpec::default(), &mut stream_rng(1, Stream::Init, 0)).unwrap();
        let b = initialize(&cfg, &ScenarioSpec::default(), &mut stream_rng(1, Stream::Init, 0)).unwrap();
        assert_eq!(a, b);
        let mut counts = [0; 3];
        for n in &a {
            assert!((0.0..=100.0).contains(&n.energy));
            assert_eq!(n.status, Status::Incomplete);
            let k = [5000.0, 4500.0, 4000.0]
                .iter()
                .position(|&c| c == n.profile.capacity_mah)
                .unwrap();
            counts[k] += 1;
        }
        let mut sorted = counts;
        sorted.sort();
        assert_eq!(sorted, [33, 33, 34]);

        let skewed = initialize(
            &cfg,
            &ScenarioSpec::proportions([0.5, 0.25, 0.25]),
            &mut stream_rng(1, Stream::Init, 0),
        )
        .unwrap();
        let n5000 = skewed.iter().filter(|n| n.profile.capacity_mah == 5000.0).count();
        assert_eq!(n5000, 50);
    }

    #[test]
    fn zero_iterations_give_baseline_only() {
        let cfg = SimConfig::<f64> {
            iterations: 0,
            ..small_cfg()
        };
        let r = run(&cfg, &ScenarioSpec::default(), ProtocolKind::HetWet, 3).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].meetings, 0);
        assert_eq!(r.rows[0].iteration, 0);
        assert_eq!(r.rows[0].balanced_count, 0);
    }

    #[test]
    fn invalid_config_is_reported() {
        let cfg = SimConfig::<f64> {
            beta: 1.5,
            ..small_cfg()
        };
        assert!(matches!(
            run(&cfg, &ScenarioSpec::default(), ProtocolKind::Pgo, 1),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn lossless_runs_conserve_energy() {
        let cfg = SimConfig::<f64> {
            beta: 0.0,
            ..small_cfg()
        };
        for p in ProtocolKind::ALL {
            let r = run(&cfg, &ScenarioSpec::default(), p, 11).unwrap();
            let e0 = r.rows[0].total_energy;
            for row in &r.rows {
                assert!((row.total_energy - e0).abs() < 1e-9, "{p}: {row:?}");
                assert_eq!(row.cumulative_loss, 0.0);
            }
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = small_cfg();
        for p in ProtocolKind::ALL {
            let a = run(&cfg, &ScenarioSpec::default(), p, 99).unwrap();
            let b = run(&cfg, &ScenarioSpec::default(), p, 99).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn batch_of_one_matches_run() {
        let cfg = small_cfg();
        let batch = run_batch(&cfg, &ScenarioSpec::default(), ProtocolKind::HetWet, 5, 1).unwrap();
        let single = run(&cfg, &ScenarioSpec::default(), ProtocolKind::HetWet, repetition_seed(5, 0)).unwrap();
        assert_eq!(batch, vec![single]);
    }

    #[test]
    fn batches_are_deterministic_and_distinct() {
        let cfg = small_cfg();
        let a = run_batch(&cfg, &ScenarioSpec::default(), ProtocolKind::Poa, 8, 6).unwrap();
        let b = run_batch_sequential(&cfg, &ScenarioSpec::default(), ProtocolKind::Poa, 8, 6).unwrap();
        assert_eq!(a, b);
        let mut seeds: Vec<u64> = a.iter().map(|r| r.seed).collect();
        seeds.dedup();
        assert_eq!(seeds.len(), 6);
        assert!(a.iter().enumerate().all(|(k, r)| r.run_id == k));
    }

    #[test]
    fn metric_trends_hold() {
        let cfg = SimConfig::<f64> {
            iterations: 50,
            ..Default::default()
        };
        let r = run(&cfg, &ScenarioSpec::default(), ProtocolKind::HetWet, 2024).unwrap();
        assert_eq!(r.rows.len(), 51);
        for w in r.rows.windows(2) {
            assert!(w[1].total_energy <= w[0].total_energy + 1e-9);
            assert!(w[1].balanced_count >= w[0].balanced_count);
            assert!(w[1].cumulative_loss >= w[0].cumulative_loss);
        }
        assert!(r.final_row().balanced_count > 0);
    }

    #[test]
    fn f32_runs_work() {
        let cfg = SimConfig::<f32> {
            num_nodes: 40,
            iterations: 20,
            ..Default::default()
        };
        let r = run(&cfg, &ScenarioSpec::default(), ProtocolKind::HetWet, 7).unwrap();
        assert_eq!(r.rows.len(), 21);
        assert!(r.final_row().balanced_count > 0);
        assert!(r.final_energies.iter().all(|e| (0.0..=100.0).contains(e)));
    }
}
