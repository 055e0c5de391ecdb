//! Deterministic simulator of peer-to-peer wireless energy transfer among
//! heterogeneous mobile devices.
//!
//! Nodes move between locations in synchronous iterations. Co-located nodes
//! may exchange energy, bounded by a charging rate that depends on the
//! sender's Qi capacity and the receiver's battery, and every exchange loses
//! a fixed fraction `beta` of what is sent. Four peer-selection protocols are
//! provided: HetWET plus the P_GO, P_OA and MobiWEB benchmarks.
//!
//! The numeric core is generic over [`Scalar`] (`f32`/`f64`); the aliases
//! below fix it to `f64`, which is what the experiment harness uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charging;
pub mod engine;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod mobility;
pub mod model;
pub mod protocols;
pub mod rng;
pub mod scalar;
pub mod scenario;

pub use charging::{
    charging_rate, energy_loss, evd_change, max_transferable, selectivity_factor,
    target_balance_level, PeerEvaluation,
};
pub use engine::{initialize, run, run_batch, run_batch_sequential, RunResult, Simulation, StepReport};
pub use error::{Error, Result};
pub use metrics::{average_energy, balanced_count, total_energy, variation_distance, MetricsRow};
pub use mobility::{derive_contacts, place_nodes, IterationPlacement};
pub use model::{
    validate_config, Contact, DeviceProfile, EvdMode, ExchangeRecord, LocationId, NodeId,
    NodeState, SimConfig, Status,
};
pub use protocols::{
    hetwet_step, mobiweb_step, pgo_step, poa_step, MatchingOutcome, ProtocolKind, StepContext,
};
pub use scalar::Scalar;
pub use scenario::{scenario_classes, DeviceClass, ScenarioSpec};

pub type Profile = DeviceProfile<f64>;
pub type Node = NodeState<f64>;
pub type Config = SimConfig<f64>;
pub type Scenario = ScenarioSpec<f64>;
pub type Row = MetricsRow<f64>;
pub type Run = RunResult<f64>;
pub type Outcome = MatchingOutcome<f64>;

pub type Profile32 = DeviceProfile<f32>;
pub type Node32 = NodeState<f32>;
pub type Config32 = SimConfig<f32>;
pub type Scenario32 = ScenarioSpec<f32>;
pub type Run32 = RunResult<f32>;
