//! Transfer physics and peer scoring: charging rate, bounded transfer,
//! loss, change in energy variation distance, selectivity factor and the
//! target balance level.
//!
//! Everything here is a pure function of its arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DeviceProfile, EvdMode, NodeId};
use crate::scalar::Scalar;

/// Denominator sums at or below this value trigger the selectivity guards.
pub const SUM_EPSILON: f64 = 1e-12;

/// Projected outcome of a transfer with one candidate peer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeerEvaluation<S> {
    pub peer: NodeId,
    /// Charging rate in % of receiver charge per minute.
    pub rate: S,
    /// Energy transferable within the contact, `rate * overlap`.
    pub transferable: S,
    /// Projected loss, `beta * transferable`.
    pub loss: S,
    pub evd_change: S,
    /// Filled in by [`score_candidates`]; zero until then.
    pub selectivity: S,
}

/// Charging rate from `sender` to `receiver` in % of the receiver's charge
/// per minute: `100 / (60 * (C_r * V_r) / (1000 * QI_s))`.
pub fn charging_rate<S: Scalar>(
    sender: &DeviceProfile<S>,
    receiver: &DeviceProfile<S>,
) -> Result<S> {
    sender.check()?;
    receiver.check()?;
    let hours_to_full =
        receiver.capacity_mah * receiver.voltage_v / (S::lit(1000.0) * sender.qi_capacity_wh);
    Ok(S::lit(100.0) / (S::lit(60.0) * hours_to_full))
}

/// Energy units transferable at `rate` during `overlap_minutes`.
#[inline]
pub fn max_transferable<S: Scalar>(rate: S, overlap_minutes: S) -> S {
    rate * overlap_minutes
}

#[inline]
pub fn energy_loss<S: Scalar>(beta: S, transferred: S) -> S {
    beta * transferred
}

/// Change in energy variation distance for moving `transferred` units from
/// a sender to a receiver relative to the network average.
pub fn evd_change<S: Scalar>(
    sender_energy: S,
    receiver_energy: S,
    avg_energy: S,
    beta: S,
    transferred: S,
    mode: EvdMode,
) -> S {
    let sender_term = (sender_energy - transferred) - avg_energy;
    let receiver_term = avg_energy - (receiver_energy + (S::one() - beta) * transferred);
    match mode {
        EvdMode::Literal => sender_term + receiver_term,
        EvdMode::Absolute => sender_term.abs() + receiver_term.abs(),
    }
}

/// Selectivity factor of `candidate` normalized over `all_candidates`.
///
/// When the loss sum is at or below [`SUM_EPSILON`] the loss term contributes
/// nothing; when the variation sum is, the raw variation change is used
/// unnormalized.
pub fn selectivity_factor<S: Scalar>(
    candidate: &PeerEvaluation<S>,
    all_candidates: &[PeerEvaluation<S>],
    w_el: S,
    w_evd: S,
) -> S {
    let (el_sum, evd_sum) = sums(all_candidates);
    combine(candidate, el_sum, evd_sum, w_el, w_evd)
}

/// Fills in `selectivity` for every candidate in place.
pub fn score_candidates<S: Scalar>(candidates: &mut [PeerEvaluation<S>], w_el: S, w_evd: S) {
    let (el_sum, evd_sum) = sums(candidates);
    for c in candidates.iter_mut() {
        c.selectivity = combine(c, el_sum, evd_sum, w_el, w_evd);
    }
}

fn sums<S: Scalar>(all: &[PeerEvaluation<S>]) -> (S, S) {
    all.iter().fold((S::zero(), S::zero()), |(el, evd), c| {
        (el + c.loss, evd + c.evd_change)
    })
}

fn combine<S: Scalar>(c: &PeerEvaluation<S>, el_sum: S, evd_sum: S, w_el: S, w_evd: S) -> S {
    let eps = S::lit(SUM_EPSILON);
    let el_term = if el_sum > eps {
        w_el * c.loss / el_sum
    } else {
        S::zero()
    };
    let evd_term = if evd_sum > eps {
        w_evd * c.evd_change / evd_sum
    } else {
        w_evd * c.evd_change
    };
    el_term + evd_term
}

/// Asymptotic energy level at which a lossy network balances, scaled to
/// `energy_scale`: `(-(1 - beta) + sqrt(1 - beta)) / beta`, with the limit
/// `1/2` at `beta = 0`.
///
/// Evaluated as `sqrt(f) / (1 + sqrt(f))` with `f = 1 - beta`, which is the
/// same expression without the cancellation near `beta = 0`.
pub fn target_balance_level<S: Scalar>(beta: S, energy_scale: S) -> Result<S> {
    if !(beta >= S::zero() && beta < S::one()) {
        return Err(Error::Domain(format!("beta must lie in [0, 1), got {beta}")));
    }
    if beta == S::zero() {
        return Ok(energy_scale * S::lit(0.5));
    }
    let root = (S::one() - beta).sqrt();
    Ok(energy_scale * root / (S::one() + root))
}
