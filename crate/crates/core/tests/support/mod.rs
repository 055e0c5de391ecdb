//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the crate's charging or protocol code.

#![allow(dead_code)]

use hetwet::{Contact, DeviceProfile, EvdMode, Node, NodeId, NodeState, SimConfig};
use rand::Rng;

pub fn rate(sender_qi_wh: f64, receiver_mah: f64, receiver_v: f64) -> f64 {
    // minutes to fill the receiver from empty at the sender's Qi power
    let minutes = receiver_mah * receiver_v / sender_qi_wh / 1000.0 * 60.0;
    100.0 / minutes
}

pub fn pair_rate(sender: &Node, receiver: &Node) -> f64 {
    rate(
        sender.profile.qi_capacity_wh,
        receiver.profile.capacity_mah,
        receiver.profile.voltage_v,
    )
}

/// Scores of the selection rule for one candidate set, in the given order.
pub fn phi(losses: &[f64], evds: &[f64], w_el: f64, w_evd: f64) -> Vec<f64> {
    let el_sum: f64 = losses.iter().sum();
    let evd_sum: f64 = evds.iter().sum();
    losses
        .iter()
        .zip(evds)
        .map(|(&l, &v)| {
            let a = if el_sum > 1e-12 { w_el * l / el_sum } else { 0.0 };
            let b = if evd_sum > 1e-12 { w_evd * v / evd_sum } else { w_evd * v };
            a + b
        })
        .collect()
}

/// First (donor, receiver) pair HetWET should form on `nodes`, found by
/// scanning initiators and enumerating every candidate.
pub fn first_pair(
    nodes: &[Node],
    contacts: &[Contact<f64>],
    cfg: &SimConfig<f64>,
    e_star: f64,
) -> Option<(usize, usize)> {
    let m = nodes.len();
    let avg = nodes.iter().map(|n| n.energy).sum::<f64>() / m as f64;
    let mut overlap = vec![vec![None; m]; m];
    for c in contacts {
        overlap[c.a().0][c.b().0] = Some(c.overlap_minutes());
        overlap[c.b().0][c.a().0] = Some(c.overlap_minutes());
    }
    let mut order: Vec<usize> = (0..m).filter(|&i| !nodes[i].is_complete()).collect();
    order.sort_by(|&x, &y| {
        let dx = (nodes[x].energy - e_star).abs();
        let dy = (nodes[y].energy - e_star).abs();
        dx.partial_cmp(&dy).unwrap().then(x.cmp(&y))
    });
    for i in order {
        let ei = nodes[i].energy;
        if (ei - e_star).abs() <= cfg.completion_tolerance {
            continue;
        }
        let above = ei > e_star;
        let mut peers = Vec::new();
        let mut losses = Vec::new();
        let mut evds = Vec::new();
        for j in 0..m {
            let Some(tau) = overlap[i][j] else { continue };
            let ej = nodes[j].energy;
            let opposite = if above { ej < e_star } else { ej > e_star };
            if nodes[j].is_complete() || !opposite {
                continue;
            }
            let (d, r) = if above { (i, j) } else { (j, i) };
            let e = pair_rate(&nodes[d], &nodes[r]) * tau;
            let s = nodes[d].energy - e - avg;
            let t = avg - nodes[r].energy - (1.0 - cfg.beta) * e;
            let evd = match cfg.evd_mode {
                EvdMode::Literal => s + t,
                EvdMode::Absolute => s.abs() + t.abs(),
            };
            peers.push(j);
            losses.push(cfg.beta * e);
            evds.push(evd);
        }
        if peers.is_empty() {
            continue;
        }
        let scores = phi(&losses, &evds, cfg.w_el, cfg.w_evd);
        let mut best = 0;
        for k in 1..scores.len() {
            if scores[k] < scores[best] {
                best = k;
            }
        }
        let j = peers[best];
        return Some(if above { (i, j) } else { (j, i) });
    }
    None
}

/// Up to ten heterogeneous nodes sharing one location.
pub fn random_instance<R: Rng>(rng: &mut R, t_min: f64) -> (Vec<Node>, Vec<Contact<f64>>) {
    let m = rng.gen_range(2..=10);
    let nodes: Vec<Node> = (0..m)
        .map(|i| {
            let c = rng.gen_range(3000.0..6000.0);
            let qi = rng.gen_range(2.0..6.0);
            let profile = DeviceProfile::with_default_voltage(c, qi).unwrap();
            NodeState::new(NodeId(i), profile, rng.gen_range(0.0..100.0))
        })
        .collect();
    let stays: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..30.0)).collect();
    let mut contacts = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            if let Some(c) = Contact::new(NodeId(a), NodeId(b), stays[a].min(stays[b]), t_min) {
                contacts.push(c);
            }
        }
    }
    (nodes, contacts)
}
