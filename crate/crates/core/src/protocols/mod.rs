//! Peer-selection and exchange strategies.
//!
//! HetWET, P_GO and MobiWEB share one greedy loop: nodes are visited once per
//! iteration in order of closeness to the target balance level, each visitor
//! picks one peer on the opposite side of that level among its valid
//! contacts, and the pair exchanges just enough energy for the visitor to
//! land on the target (bounded by what the contact can carry). They differ
//! only in how the peer is picked. P_OA pairs contacts in random order and
//! equalizes the two endpoints around the network average.

mod benchmarks;
mod hetwet;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use benchmarks::{mobiweb_step, pgo_step, poa_step};
pub use hetwet::{evaluate_candidates, hetwet_step};

use crate::charging::max_transferable;
use crate::error::Error;
use crate::metrics::average_energy;
use crate::model::{Contact, DeviceProfile, ExchangeRecord, NodeId, NodeState, SimConfig, Status};
use crate::rng::SimRng;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolKind {
    #[serde(rename = "hetwet")]
    HetWet,
    #[serde(rename = "pgo")]
    Pgo,
    #[serde(rename = "poa")]
    Poa,
    #[serde(rename = "mobiweb")]
    MobiWeb,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::HetWet,
        ProtocolKind::Pgo,
        ProtocolKind::Poa,
        ProtocolKind::MobiWeb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::HetWet => "hetwet",
            ProtocolKind::Pgo => "pgo",
            ProtocolKind::Poa => "poa",
            ProtocolKind::MobiWeb => "mobiweb",
        }
    }

    /// Runs one iteration of this protocol over `nodes`.
    ///
    /// `rng` is the protocol stream for this iteration; only P_OA draws
    /// from it.
    pub fn step<S: Scalar>(
        self,
        nodes: &mut [NodeState<S>],
        contacts: &[Contact<S>],
        ctx: &StepContext<'_, S>,
        rng: &mut SimRng,
    ) -> MatchingOutcome<S> {
        let (cfg, e_star, t) = (ctx.cfg, ctx.e_star, ctx.iteration);
        match self {
            ProtocolKind::HetWet => hetwet_step(nodes, contacts, cfg, e_star, t),
            ProtocolKind::Pgo => pgo_step(nodes, contacts, cfg, e_star, t),
            ProtocolKind::MobiWeb => mobiweb_step(nodes, contacts, cfg, e_star, t),
            ProtocolKind::Poa => {
                let Ok(avg) = average_energy(nodes) else {
                    return MatchingOutcome::default();
                };
                poa_step(nodes, contacts, cfg, avg, e_star, t, rng)
            }
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hetwet" => Ok(ProtocolKind::HetWet),
            "pgo" => Ok(ProtocolKind::Pgo),
            "poa" => Ok(ProtocolKind::Poa),
            "mobiweb" => Ok(ProtocolKind::MobiWeb),
            _ => Err(Error::UnknownProtocol(s.to_owned())),
        }
    }
}

/// Per-iteration inputs shared by all protocols.
#[derive(Clone, Copy, Debug)]
pub struct StepContext<'a, S> {
    pub cfg: &'a SimConfig<S>,
    /// Target balance level.
    pub e_star: S,
    pub iteration: usize,
}

/// Result of one protocol iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingOutcome<S> {
    pub exchanges: Vec<ExchangeRecord<S>>,
    /// Nodes that flipped to `Complete` during this iteration.
    pub newly_balanced: Vec<NodeId>,
    pub meetings_count: usize,
}

impl<S> Default for MatchingOutcome<S> {
    fn default() -> Self {
        Self {
            exchanges: Vec::new(),
            newly_balanced: Vec::new(),
            meetings_count: 0,
        }
    }
}

impl<S: Scalar> MatchingOutcome<S> {
    pub fn total_sent(&self) -> S {
        self.exchanges.iter().map(|x| x.sent).sum()
    }

    pub fn total_loss(&self) -> S {
        self.exchanges.iter().map(|x| x.loss).sum()
    }
}

/// A contact seen from one endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor<S> {
    pub peer: NodeId,
    pub overlap_minutes: S,
}

/// Per-node neighbor lists, each sorted by peer id.
pub(crate) fn adjacency<S: Scalar>(num_nodes: usize, contacts: &[Contact<S>]) -> Vec<Vec<Neighbor<S>>> {
    let mut adj = vec![Vec::new(); num_nodes];
    for c in contacts {
        let overlap_minutes = c.overlap_minutes();
        adj[c.a().index()].push(Neighbor {
            peer: c.b(),
            overlap_minutes,
        });
        adj[c.b().index()].push(Neighbor {
            peer: c.a(),
            overlap_minutes,
        });
    }
    for list in &mut adj {
        list.sort_by_key(|n| n.peer);
    }
    adj
}

/// Charging rate without re-validating profiles, which are checked when
/// nodes are created.
#[inline]
pub(crate) fn rate<S: Scalar>(sender: &DeviceProfile<S>, receiver: &DeviceProfile<S>) -> S {
    let hours_to_full =
        receiver.capacity_mah * receiver.voltage_v / (S::lit(1000.0) * sender.qi_capacity_wh);
    S::lit(100.0) / (S::lit(60.0) * hours_to_full)
}

/// Donor and receiver of a pair given which endpoint sits above the
/// reference level.
#[inline]
pub(crate) fn orient(initiator: NodeId, peer: NodeId, initiator_above: bool) -> (NodeId, NodeId) {
    if initiator_above {
        (initiator, peer)
    } else {
        (peer, initiator)
    }
}

/// Clamps a proposed amount so the donor stays non-negative and the receiver
/// stays within `energy_scale`, then rounds it down onto the energy grid.
pub(crate) fn saturate<S: Scalar>(amount: S, donor: &NodeState<S>, receiver: &NodeState<S>, cfg: &SimConfig<S>) -> S {
    let headroom = (cfg.energy_scale - receiver.energy) / (S::one() - cfg.beta);
    amount.min(donor.energy).min(headroom).max(S::zero()).quantize_down()
}

/// Moves `amount` from donor to receiver and returns the record.
pub(crate) fn execute<S: Scalar>(
    nodes: &mut [NodeState<S>],
    donor: NodeId,
    receiver: NodeId,
    amount: S,
    cfg: &SimConfig<S>,
    iteration: usize,
) -> ExchangeRecord<S> {
    let record = ExchangeRecord::new(donor, receiver, amount, cfg.beta, iteration);
    let d = &mut nodes[donor.index()];
    d.energy = (d.energy - record.sent).max(S::zero());
    let r = &mut nodes[receiver.index()];
    r.energy = (r.energy + record.received).min(cfg.energy_scale);
    record
}

/// Flags `id` as `Complete` if it sits within tolerance of the target.
pub(crate) fn mark_if_balanced<S: Scalar>(
    nodes: &mut [NodeState<S>],
    id: NodeId,
    e_star: S,
    cfg: &SimConfig<S>,
    newly_balanced: &mut Vec<NodeId>,
) {
    let n = &mut nodes[id.index()];
    if n.status == Status::Incomplete && (n.energy - e_star).abs() <= cfg.completion_tolerance {
        n.status = Status::Complete;
        newly_balanced.push(id);
    }
}

/// Greedy loop shared by HetWET, P_GO and MobiWEB.
///
/// `choose` receives the initiator, whether it sits above `e_star`, the
/// non-empty opposite-side candidate list and the node slice; it returns the
/// index into the candidate list of the selected peer.
pub(crate) fn greedy_step<S, F>(
    nodes: &mut [NodeState<S>],
    contacts: &[Contact<S>],
    cfg: &SimConfig<S>,
    e_star: S,
    iteration: usize,
    mut choose: F,
) -> MatchingOutcome<S>
where
    S: Scalar,
    F: FnMut(&[NodeState<S>], NodeId, bool, &[Neighbor<S>]) -> usize,
{
    let mut outcome = MatchingOutcome::default();
    if nodes.is_empty() {
        return outcome;
    }
    let adj = adjacency(nodes.len(), contacts);
    let mut matched = vec![false; nodes.len()];

    // Unmatched energies never change within an iteration, so a sort up front
    // visits nodes in the same order as re-selecting the closest each time.
    let mut order: Vec<NodeId> = nodes.iter().filter(|n| !n.is_complete()).map(|n| n.id).collect();
    order.sort_by(|x, y| {
        let dx = (nodes[x.index()].energy - e_star).abs();
        let dy = (nodes[y.index()].energy - e_star).abs();
        dx.partial_cmp(&dy)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.cmp(y))
    });

    for initiator in order {
        if matched[initiator.index()] {
            continue;
        }
        let energy = nodes[initiator.index()].energy;
        if (energy - e_star).abs() <= cfg.completion_tolerance {
            mark_if_balanced(nodes, initiator, e_star, cfg, &mut outcome.newly_balanced);
            continue;
        }
        let above = energy > e_star;
        let candidates: Vec<Neighbor<S>> = adj[initiator.index()]
            .iter()
            .copied()
            .filter(|nb| {
                let p = &nodes[nb.peer.index()];
                !matched[nb.peer.index()]
                    && !p.is_complete()
                    && if above { p.energy < e_star } else { p.energy > e_star }
            })
            .collect();
        if candidates.is_empty() {
            continue;
        }

        let pick = candidates[choose(nodes, initiator, above, &candidates)];
        let (donor, receiver) = orient(initiator, pick.peer, above);
        let cap = max_transferable(
            rate(&nodes[donor.index()].profile, &nodes[receiver.index()].profile),
            pick.overlap_minutes,
        );
        let needed = if above {
            energy - e_star
        } else {
            (e_star - energy) / (S::one() - cfg.beta)
        };
        let amount = saturate(
            cap.min(needed),
            &nodes[donor.index()],
            &nodes[receiver.index()],
            cfg,
        );
        if !(amount > S::zero()) {
            continue;
        }

        let record = execute(nodes, donor, receiver, amount, cfg, iteration);
        outcome.exchanges.push(record);
        matched[initiator.index()] = true;
        matched[pick.peer.index()] = true;
        mark_if_balanced(nodes, initiator, e_star, cfg, &mut outcome.newly_balanced);
        mark_if_balanced(nodes, pick.peer, e_star, cfg, &mut outcome.newly_balanced);
    }
    outcome.meetings_count = outcome.exchanges.len();
    outcome
}

/// Lowest index among the entries minimizing `key`; candidate lists are
/// sorted by node id, so this breaks ties toward the lowest id.
pub(crate) fn argmin_by_key<T, S: Scalar>(items: &[T], mut key: impl FnMut(&T) -> S) -> usize {
    let mut best = 0;
    let mut best_key = key(&items[0]);
    for (i, item) in items.iter().enumerate().skip(1) {
        let k = key(item);
        if k < best_key {
            best = i;
            best_key = k;
        }
    }
    best
}
