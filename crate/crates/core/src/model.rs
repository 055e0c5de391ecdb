//! Domain types shared by every other module, plus the global simulation
//! configuration.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Nominal Li-ion smartphone cell voltage used when a profile does not
/// specify one.
pub const DEFAULT_VOLTAGE_V: f64 = 3.85;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocationId(pub usize);

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Immutable hardware parameters of a device.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile<S> {
    /// Battery capacity in mAh.
    pub capacity_mah: S,
    /// Battery voltage in volts.
    pub voltage_v: S,
    /// Reverse wireless (Qi) charging capacity in Wh.
    pub qi_capacity_wh: S,
}

impl<S: Scalar> DeviceProfile<S> {
    /// Builds a profile, rejecting non-positive or non-finite parameters.
    pub fn new(capacity_mah: S, voltage_v: S, qi_capacity_wh: S) -> Result<Self> {
        let profile = Self {
            capacity_mah,
            voltage_v,
            qi_capacity_wh,
        };
        profile.check()?;
        Ok(profile)
    }

    /// Profile with the default cell voltage.
    pub fn with_default_voltage(capacity_mah: S, qi_capacity_wh: S) -> Result<Self> {
        Self::new(capacity_mah, S::lit(DEFAULT_VOLTAGE_V), qi_capacity_wh)
    }

    pub fn check(&self) -> Result<()> {
        let fields = [
            ("capacity_mah", self.capacity_mah),
            ("voltage_v", self.voltage_v),
            ("qi_capacity_wh", self.qi_capacity_wh),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > S::zero()) {
                return Err(Error::Domain(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }

    /// Battery energy in Wh.
    pub fn battery_wh(&self) -> S {
        self.capacity_mah * self.voltage_v / S::lit(1000.0)
    }

    pub fn cast<T: Scalar>(&self) -> DeviceProfile<T> {
        DeviceProfile {
            capacity_mah: T::lit(self.capacity_mah.as_f64()),
            voltage_v: T::lit(self.voltage_v.as_f64()),
            qi_capacity_wh: T::lit(self.qi_capacity_wh.as_f64()),
        }
    }
}

/// Balance status of a node. `Complete` is sticky.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    #[default]
    Incomplete,
    Complete,
}

/// Mutable per-node simulation state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeState<S> {
    pub id: NodeId,
    pub profile: DeviceProfile<S>,
    /// Residual energy in abstract units, always within `[0, energy_scale]`.
    pub energy: S,
    pub location: LocationId,
    /// Minutes the node stays at its current location this iteration.
    pub stay_remaining: S,
    pub status: Status,
}

impl<S: Scalar> NodeState<S> {
    pub fn new(id: NodeId, profile: DeviceProfile<S>, energy: S) -> Self {
        Self {
            id,
            profile,
            energy,
            location: LocationId(0),
            stay_remaining: S::zero(),
            status: Status::Incomplete,
        }
    }

    #[inline]
    pub fn is_complete(&self) -> bool {
        self.status == Status::Complete
    }
}

/// A valid co-location opportunity between two distinct nodes.
///
/// Stored once per unordered pair with `a < b`. A contact shorter than the
/// minimum transfer time cannot be constructed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contact<S> {
    a: NodeId,
    b: NodeId,
    overlap_minutes: S,
}

impl<S: Scalar> Contact<S> {
    /// Returns `None` for self-contacts and for overlaps below `t_min`.
    pub fn new(x: NodeId, y: NodeId, overlap_minutes: S, t_min: S) -> Option<Self> {
        if x == y || !(overlap_minutes >= t_min) {
            return None;
        }
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        Some(Self {
            a,
            b,
            overlap_minutes,
        })
    }

    #[inline]
    pub fn a(&self) -> NodeId {
        self.a
    }

    #[inline]
    pub fn b(&self) -> NodeId {
        self.b
    }

    #[inline]
    pub fn overlap_minutes(&self) -> S {
        self.overlap_minutes
    }

    /// The endpoint opposite to `id`, if `id` is part of this contact.
    pub fn other(&self, id: NodeId) -> Option<NodeId> {
        if id == self.a {
            Some(self.b)
        } else if id == self.b {
            Some(self.a)
        } else {
            None
        }
    }
}

/// One executed peer-to-peer transfer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeRecord<S> {
    pub sender: NodeId,
    pub receiver: NodeId,
    /// Energy units drawn from the sender.
    pub sent: S,
    /// Energy units credited to the receiver, `(1 - beta) * sent`.
    pub received: S,
    /// Energy units dissipated, `beta * sent`.
    pub loss: S,
    pub iteration: usize,
}

impl<S: Scalar> ExchangeRecord<S> {
    pub fn new(sender: NodeId, receiver: NodeId, sent: S, beta: S, iteration: usize) -> Self {
        let loss = beta * sent;
        Self {
            sender,
            receiver,
            sent,
            received: sent - loss,
            loss,
            iteration,
        }
    }
}

/// How the change in energy variation distance is evaluated for a candidate
/// transfer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvdMode {
    /// Signed bracket terms, exactly as the formula is written.
    #[default]
    Literal,
    /// Absolute deviations from the average.
    Absolute,
}

impl fmt::Display for EvdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvdMode::Literal => "literal",
            EvdMode::Absolute => "absolute",
        })
    }
}

/// Global simulation configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig<S> {
    pub num_nodes: usize,
    pub num_locations: usize,
    pub stay_min_minutes: S,
    pub stay_max_minutes: S,
    /// Fraction of transferred energy lost in every exchange, in `[0, 1)`.
    pub beta: S,
    /// Minimum co-location time for a valid contact.
    pub t_min_minutes: S,
    /// Weight of the energy-loss term in the selectivity factor.
    pub w_el: S,
    /// Weight of the variation-distance term in the selectivity factor.
    pub w_evd: S,
    pub iterations: usize,
    pub completion_tolerance: S,
    pub evd_mode: EvdMode,
    pub rng_seed: u64,
    /// Energy span of a fully charged node.
    pub energy_scale: S,
}

impl<S: Scalar> Default for SimConfig<S> {
    fn default() -> Self {
        // f32 cannot resolve 1e-6 around ~50 units; widen the tolerance to a
        // few ulps of the energy scale in that case.
        let precision_floor = S::epsilon() * S::lit(100.0) * S::lit(4.0);
        Self {
            num_nodes: 100,
            num_locations: 5,
            stay_min_minutes: S::lit(10.0),
            stay_max_minutes: S::lit(30.0),
            beta: S::lit(0.2),
            t_min_minutes: S::lit(1.0),
            w_el: S::lit(0.5),
            w_evd: S::lit(0.5),
            iterations: 50,
            completion_tolerance: S::lit(1e-6).max(precision_floor),
            evd_mode: EvdMode::Literal,
            rng_seed: 0,
            energy_scale: S::lit(100.0),
        }
    }
}

impl<S: Scalar> SimConfig<S> {
    pub fn validate(&self) -> Result<()> {
        let violations = validate_config(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(violations))
        }
    }

    pub fn cast<T: Scalar>(&self) -> SimConfig<T> {
        let c = |v: S| T::lit(v.as_f64());
        SimConfig {
            num_nodes: self.num_nodes,
            num_locations: self.num_locations,
            stay_min_minutes: c(self.stay_min_minutes),
            stay_max_minutes: c(self.stay_max_minutes),
            beta: c(self.beta),
            t_min_minutes: c(self.t_min_minutes),
            w_el: c(self.w_el),
            w_evd: c(self.w_evd),
            iterations: self.iterations,
            completion_tolerance: c(self.completion_tolerance),
            evd_mode: self.evd_mode,
            rng_seed: self.rng_seed,
            energy_scale: c(self.energy_scale),
        }
    }
}

/// Lists every violated configuration invariant. An empty list means the
/// configuration is usable.
pub fn validate_config<S: Scalar>(cfg: &SimConfig<S>) -> Vec<String> {
    let mut out = Vec::new();
    let zero = S::zero();

    let reals = [
        ("stay_min_minutes", cfg.stay_min_minutes),
        ("stay_max_minutes", cfg.stay_max_minutes),
        ("beta", cfg.beta),
        ("t_min_minutes", cfg.t_min_minutes),
        ("w_el", cfg.w_el),
        ("w_evd", cfg.w_evd),
        ("completion_tolerance", cfg.completion_tolerance),
        ("energy_scale", cfg.energy_scale),
    ];
    for (name, value) in reals {
        if !value.is_finite() {
            out.push(format!("{name} must be finite"));
        }
    }

    if cfg.num_nodes == 0 {
        out.push("num_nodes must be > 0".to_owned());
    }
    if cfg.num_locations == 0 {
        out.push("num_locations must be > 0".to_owned());
    }
    if cfg.beta < zero {
        out.push("beta must be >= 0".to_owned());
    }
    if cfg.beta >= S::one() {
        out.push("beta must be < 1".to_owned());
    }
    if cfg.w_el < zero {
        out.push("w_el must be >= 0".to_owned());
    }
    if cfg.w_evd < zero {
        out.push("w_evd must be >= 0".to_owned());
    }
    if cfg.w_el == zero && cfg.w_evd == zero {
        out.push("weights must not both be zero".to_owned());
    }
    if cfg.stay_min_minutes < zero {
        out.push("stay_min_minutes must be >= 0".to_owned());
    }
    if cfg.stay_min_minutes > cfg.stay_max_minutes {
        out.push("stay_min_minutes must be <= stay_max_minutes".to_owned());
    }
    if cfg.t_min_minutes < zero {
        out.push("t_min_minutes must be >= 0".to_owned());
    }
    if cfg.completion_tolerance < zero {
        out.push("completion_tolerance must be >= 0".to_owned());
    }
    if !(cfg.energy_scale > zero) {
        out.push("energy_scale must be > 0".to_owned());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = SimConfig::<f64>::default();
        assert_eq!(cfg.beta, 0.2);
        assert_eq!((cfg.w_el, cfg.w_evd), (0.5, 0.5));
        assert!(validate_config(&cfg).is_empty());
        assert_eq!(cfg.completion_tolerance, 1e-6);
    }

    #[test]
    fn beta_one_is_rejected() {
        let cfg = SimConfig::<f64> {
            beta: 1.0,
            ..Default::default()
        };
        assert_eq!(validate_config(&cfg), vec!["beta must be < 1".to_owned()]);
    }

    #[test]
    fn zero_weights_are_rejected() {
        let cfg = SimConfig::<f64> {
            w_el: 0.0,
            w_evd: 0.0,
            ..Default::default()
        };
        assert_eq!(
            validate_config(&cfg),
            vec!["weights must not both be zero".to_owned()]
        );
    }

    #[test]
    fn collects_every_violation() {
        let cfg = SimConfig::<f64> {
            beta: -0.1,
            stay_min_minutes: 40.0,
            num_locations: 0,
            ..Default::default()
        };
        let v = validate_config(&cfg);
        assert_eq!(v.len(), 3, "{v:?}");
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn f32_tolerance_is_widened() {
        let cfg = SimConfig::<f32>::default();
        assert!(cfg.completion_tolerance > 1e-6);
        assert!(validate_config(&cfg).is_empty());
    }

    #[test]
    fn profile_rejects_non_positive_fields() {
        assert!(DeviceProfile::new(5000.0, 3.85, 5.0).is_ok());
        assert!(DeviceProfile::new(0.0, 3.85, 5.0).is_err());
        assert!(DeviceProfile::new(5000.0, -1.0, 5.0).is_err());
        assert!(DeviceProfile::new(5000.0, 3.85, f64::NAN).is_err());
    }

    #[test]
    fn contact_normalizes_and_filters() {
        let c = Contact::new(NodeId(3), NodeId(1), 12.0, 1.0).unwrap();
        assert_eq!((c.a(), c.b()), (NodeId(1), NodeId(3)));
        assert_eq!(c.other(NodeId(1)), Some(NodeId(3)));
        assert_eq!(c.other(NodeId(2)), None);
        assert!(Contact::new(NodeId(1), NodeId(1), 12.0, 1.0).is_none());
        assert!(Contact::new(NodeId(0), NodeId(1), 0.5, 1.0).is_none());
    }

    #[test]
    fn exchange_record_splits_sent_amount() {
        let r = ExchangeRecord::<f64>::new(NodeId(0), NodeId(1), 10.0, 0.2, 3);
        assert_eq!(r.loss, 2.0);
        assert_eq!(r.received, 8.0);
        assert!((r.sent - (r.received + r.loss)).abs() < 1e-12);
    }
}
