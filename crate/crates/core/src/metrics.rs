//! Network-level metrics recorded once per iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NodeState;
use crate::scalar::Scalar;

/// Per-iteration network aggregates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow<S> {
    pub iteration: usize,
    pub total_energy: S,
    /// Distance between the normalized energy distribution and the uniform
    /// one, in `[0, 2]`.
    pub variation_distance: S,
    pub meetings: usize,
    pub balanced_count: usize,
    pub cumulative_loss: S,
}

pub fn total_energy<S: Scalar>(nodes: &[NodeState<S>]) -> S {
    nodes.iter().map(|n| n.energy).sum()
}

/// `sum_u |E(u) / E_total - 1/m|`, without the conventional 1/2 factor.
pub fn variation_distance<S: Scalar>(nodes: &[NodeState<S>]) -> Result<S> {
    let total = total_energy(nodes);
    if !(total > S::zero()) {
        return Err(Error::Degenerate("variation distance needs positive total energy"));
    }
    let uniform = S::one() / S::from_count(nodes.len());
    Ok(nodes
        .iter()
        .map(|n| (n.energy / total - uniform).abs())
        .sum())
}

pub fn average_energy<S: Scalar>(nodes: &[NodeState<S>]) -> Result<S> {
    if nodes.is_empty() {
        return Err(Error::Degenerate("average energy of an empty network"));
    }
    Ok(total_energy(nodes) / S::from_count(nodes.len()))
}

/// Nodes whose status is `Complete`. Completion is sticky, so this counts
/// nodes that have reached the balance level at some point, not nodes that
/// currently sit near it.
pub fn balanced_count<S: Scalar>(nodes: &[NodeState<S>]) -> usize {
    nodes.iter().filter(|n| n.is_complete()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DeviceProfile, NodeId, Status};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn nodes(energies: &[f64]) -> Vec<NodeState<f64>> {
        let p = DeviceProfile::with_default_voltage(4500.0, 4.0).unwrap();
        energies
            .iter()
            .enumerate()
            .map(|(i, &e)| NodeState::new(NodeId(i), p, e))
            .collect()
    }

    #[test]
    fn totals_and_averages() {
        let n = nodes(&[10.0, 20.0, 30.0, 40.0]);
        assert_eq!(total_energy(&n), 100.0);
        assert_eq!(average_energy(&n).unwrap(), 25.0);
        assert_eq!(total_energy::<f64>(&[]), 0.0);
        assert_eq!(average_energy(&nodes(&[0.0, 0.0])).unwrap(), 0.0);
        assert!(average_energy::<f64>(&[]).is_err());
    }

    #[test]
    fn variation_distance_examples() {
        let v = variation_distance(&nodes(&[10.0, 20.0, 30.0, 40.0])).unwrap();
        assert_relative_eq!(v, 0.15 + 0.05 + 0.05 + 0.15, epsilon = 1e-12);
        assert_relative_eq!(v, 0.4, epsilon = 1e-12);
        assert_eq!(variation_distance(&nodes(&[7.0; 5])).unwrap(), 0.0);
        let v = variation_distance(&nodes(&[100.0, 0.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(v, 0.75 + 3.0 * 0.25, epsilon = 1e-12);
        assert!(matches!(
            variation_distance(&nodes(&[0.0, 0.0])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn balanced_counts_complete_nodes() {
        let mut n = nodes(&[10.0, 47.2, 90.0]);
        assert_eq!(balanced_count(&n), 0);
        n[1].status = Status::Complete;
        assert_eq!(balanced_count(&n), 1);
        n.iter_mut().for_each(|x| x.status = Status::Complete);
        assert_eq!(balanced_count(&n), 3);
    }

    proptest! {
        #[test]
        fn variation_distance_scale_invariant(
            energies in prop::collection::vec(0.0f64..100.0, 1..40),
            k in 0.01f64..100.0,
        ) {
            let base = nodes(&energies);
            prop_assume!(total_energy(&base) > 1e-6);
            let scaled: Vec<f64> = energies.iter().map(|e| e * k).collect();
            let a = variation_distance(&base).unwrap();
            let b = variation_distance(&nodes(&scaled)).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
            prop_assert!((0.0..=2.0 + 1e-12).contains(&a));
        }
    }
}
