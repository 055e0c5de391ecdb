//! Per-iteration node placement and contact derivation.
//!
//! Each iteration every node picks a location uniformly at random and a stay
//! duration uniform over `[stay_min, stay_max]`. All nodes arrive at the start
//! of the iteration, so two co-located nodes overlap for the shorter of their
//! two stays.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Contact, LocationId, NodeId, SimConfig};
use crate::scalar::Scalar;

/// Location and stay duration of every node for one iteration, indexed by
/// node id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationPlacement<S> {
    pub iteration: usize,
    pub assignments: Vec<(LocationId, S)>,
}

impl<S: Scalar> IterationPlacement<S> {
    pub fn location(&self, id: NodeId) -> LocationId {
        self.assignments[id.index()].0
    }

    pub fn stay(&self, id: NodeId) -> S {
        self.assignments[id.index()].1
    }

    /// Number of nodes placed at each location.
    pub fn occupancy(&self, num_locations: usize) -> Vec<usize> {
        let mut counts = vec![0; num_locations];
        for (loc, _) in &self.assignments {
            counts[loc.0] += 1;
        }
        counts
    }
}

pub fn place_nodes<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SimConfig<S>,
    iteration: usize,
) -> IterationPlacement<S> {
    let span = cfg.stay_max_minutes - cfg.stay_min_minutes;
    let assignments = (0..cfg.num_nodes)
        .map(|_| {
            let loc = LocationId(rng.gen_range(0..cfg.num_locations));
            let u = S::lit(rng.gen::<f64>());
            (loc, cfg.stay_min_minutes + span * u)
        })
        .collect();
    IterationPlacement {
        iteration,
        assignments,
    }
}

/// One contact per co-located pair whose overlap reaches `t_min`, sorted by
/// `(a, b)`.
pub fn derive_contacts<S: Scalar>(placement: &IterationPlacement<S>, t_min: S) -> Vec<Contact<S>> {
    let num_locations = placement
        .assignments
        .iter()
        .map(|(loc, _)| loc.0 + 1)
        .max()
        .unwrap_or(0);
    let mut buckets: Vec<Vec<NodeId>> = vec![Vec::new(); num_locations];
    for (i, (loc, _)) in placement.assignments.iter().enumerate() {
        buckets[loc.0].push(NodeId(i));
    }

    let mut contacts = Vec::new();
    for bucket in &buckets {
        for (k, &a) in bucket.iter().enumerate() {
            for &b in &bucket[k + 1..] {
                let overlap = placement.stay(a).min(placement.stay(b));
                contacts.extend(Contact::new(a, b, overlap, t_min));
            }
        }
    }
    contacts.sort_by_key(|c| (c.a(), c.b()));
    contacts
}

/// Writes `iteration,node_id,location,stay_minutes` rows for debugging.
pub fn write_placement_trace<S: Scalar, W: Write>(
    out: W,
    placements: &[IterationPlacement<S>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "node_id", "location", "stay_minutes"])?;
    for p in placements {
        for (i, (loc, stay)) in p.assignments.iter().enumerate() {
            w.write_record([
                p.iteration.to_string(),
                i.to_string(),
                loc.to_string(),
                stay.to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
