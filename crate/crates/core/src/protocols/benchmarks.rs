//! Benchmark protocols, all bounded by the same charging-rate and contact
//! duration rules as HetWET.

use rand::seq::SliceRandom;

use crate::charging::max_transferable;
use crate::model::{Contact, NodeState, SimConfig};
use crate::rng::SimRng;
use crate::scalar::Scalar;

use super::{argmin_by_key, execute, greedy_step, mark_if_balanced, orient, rate, saturate, MatchingOutcome};

/// P_GO: the peer whose energy is closest to the target level.
pub fn pgo_step<S: Scalar>(
    nodes: &mut [NodeState<S>],
    contacts: &[Contact<S>],
    cfg: &SimConfig<S>,
    e_star: S,
    iteration: usize,
) -> MatchingOutcome<S> {
    greedy_step(nodes, contacts, cfg, e_star, iteration, |nodes, _, _, candidates| {
        argmin_by_key(candidates, |nb| (nodes[nb.peer.index()].energy - e_star).abs())
    })
}

/// Simplified MobiWEB: the peer that can move the most energy during the
/// current contact, i.e. the largest `rate * overlap`.
pub fn mobiweb_step<S: Scalar>(
    nodes: &mut [NodeState<S>],
    contacts: &[Contact<S>],
    cfg: &SimConfig<S>,
    e_star: S,
    iteration: usize,
) -> MatchingOutcome<S> {
    greedy_step(nodes, contacts, cfg, e_star, iteration, |nodes, initiator, above, candidates| {
        argmin_by_key(candidates, |nb| {
            let (d, r) = orient(initiator, nb.peer, above);
            -max_transferable(
                rate(&nodes[d.index()].profile, &nodes[r.index()].profile),
                nb.overlap_minutes,
            )
        })
    })
}

/// P_OA: contacts are visited in shuffled order; a pair straddling the
/// network average equalizes, `x = (E_hi - E_lo) / (2 - beta)`, capped by
/// what the contact can carry.
pub fn poa_step<S: Scalar>(
    nodes: &mut [NodeState<S>],
    contacts: &[Contact<S>],
    cfg: &SimConfig<S>,
    avg_energy: S,
    e_star: S,
    iteration: usize,
    rng: &mut SimRng,
) -> MatchingOutcome<S> {
    let mut outcome = MatchingOutcome::default();
    let mut order: Vec<&Contact<S>> = contacts.iter().collect();
    order.shuffle(rng);
    let mut matched = vec![false; nodes.len()];

    for c in order {
        let (a, b) = (c.a(), c.b());
        if matched[a.index()] || matched[b.index()] {
            continue;
        }
        let (na, nb) = (&nodes[a.index()], &nodes[b.index()]);
        if na.is_complete() || nb.is_complete() {
            continue;
        }
        let (hi, lo) = if na.energy > nb.energy { (a, b) } else { (b, a) };
        let (nh, nl) = (&nodes[hi.index()], &nodes[lo.index()]);
        if !(nh.energy > avg_energy && nl.energy < avg_energy) {
            continue;
        }
        let equalizing = (nh.energy - nl.energy) / (S::lit(2.0) - cfg.beta);
        let cap = max_transferable(rate(&nh.profile, &nl.profile), c.overlap_minutes());
        let amount = saturate(equalizing.min(cap), nh, nl, cfg);
        if !(amount > S::zero()) {
            continue;
        }
        outcome
            .exchanges
            .push(execute(nodes, hi, lo, amount, cfg, iteration));
        matched[a.index()] = true;
        matched[b.index()] = true;
        mark_if_balanced(nodes, hi, e_star, cfg, &mut outcome.newly_balanced);
        mark_if_balanced(nodes, lo, e_star, cfg, &mut outcome.newly_balanced);
    }
    outcome.meetings_count = outcome.exchanges.len();
    outcome
}
