//! Heterogeneity-aware peer selection.
//!
//! For every candidate the initiator projects the transfer the contact could
//! carry given both devices' hardware, the loss it would cost and how it
//! would move the two endpoints relative to the network average. The peer
//! with the lowest selectivity factor wins.

use crate::charging::{energy_loss, evd_change, max_transferable, score_candidates, PeerEvaluation};
use crate::metrics::average_energy;
use crate::model::{Contact, NodeId, NodeState, SimConfig};
use crate::scalar::Scalar;

use super::{argmin_by_key, greedy_step, orient, rate, MatchingOutcome, Neighbor};

/// Scores every candidate of `initiator`. The actual donor of each pair is
/// evaluated as the sender, whichever side the initiator is on.
pub fn evaluate_candidates<S: Scalar>(
    nodes: &[NodeState<S>],
    initiator: NodeId,
    initiator_above: bool,
    candidates: &[Neighbor<S>],
    cfg: &SimConfig<S>,
    avg_energy: S,
) -> Vec<PeerEvaluation<S>> {
    let mut evals: Vec<PeerEvaluation<S>> = candidates
        .iter()
        .map(|nb| {
            let (donor, receiver) = orient(initiator, nb.peer, initiator_above);
            let (donor, receiver) = (&nodes[donor.index()], &nodes[receiver.index()]);
            let rate = rate(&donor.profile, &receiver.profile);
            let transferable = max_transferable(rate, nb.overlap_minutes);
            PeerEvaluation {
                peer: nb.peer,
                rate,
                transferable,
                loss: energy_loss(cfg.beta, transferable),
                evd_change: evd_change(
                    donor.energy,
                    receiver.energy,
                    avg_energy,
                    cfg.beta,
                    transferable,
                    cfg.evd_mode,
                ),
                selectivity: S::zero(),
            }
        })
        .collect();
    score_candidates(&mut evals, cfg.w_el, cfg.w_evd);
    evals
}

/// One HetWET iteration. The network average used for the variation term is
/// taken once, before any exchange.
pub fn hetwet_step<S: Scalar>(
    nodes: &mut [NodeState<S>],
    contacts: &[Contact<S>],
    cfg: &SimConfig<S>,
    e_star: S,
    iteration: usize,
) -> MatchingOutcome<S> {
    let Ok(avg) = average_energy(nodes) else {
        return MatchingOutcome::default();
    };
    greedy_step(nodes, contacts, cfg, e_star, iteration, |nodes, initiator, above, candidates| {
        let evals = evaluate_candidates(nodes, initiator, above, candidates, cfg, avg);
        argmin_by_key(&evals, |e| e.selectivity)
    })
}
