//! Device heterogeneity scenarios and node-to-class allocation.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DeviceProfile;
use crate::scalar::Scalar;

/// Battery capacity (mAh) and Qi charging capacity (Wh) of one device class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceClass<S> {
    pub capacity_mah: S,
    pub qi_capacity_wh: S,
}

impl<S: Scalar> DeviceClass<S> {
    pub fn new(capacity_mah: f64, qi_capacity_wh: f64) -> Self {
        Self {
            capacity_mah: S::lit(capacity_mah),
            qi_capacity_wh: S::lit(qi_capacity_wh),
        }
    }

    pub fn profile(&self) -> Result<DeviceProfile<S>> {
        DeviceProfile::with_default_voltage(self.capacity_mah, self.qi_capacity_wh)
            .map_err(|e| Error::InvalidScenario(e.to_string()))
    }
}

/// The reference three-class device mix.
pub fn reference_classes<S: Scalar>() -> Vec<DeviceClass<S>> {
    vec![
        DeviceClass::new(5000.0, 5.0),
        DeviceClass::new(4500.0, 4.0),
        DeviceClass::new(4000.0, 3.0),
    ]
}

pub const DEFAULT_DELTA_C_MAH: f64 = 500.0;
pub const DEFAULT_DELTA_Q_WH: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec<S> {
    /// Every class receives an equal share of the nodes.
    UniformClasses { classes: Vec<DeviceClass<S>> },
    /// Classes receive the given shares, which must sum to 1.
    ProportionClasses {
        classes: Vec<DeviceClass<S>>,
        proportions: Vec<S>,
    },
    /// Three equally shared classes spread `theta` steps around
    /// (4500 mAh, 4 Wh).
    ThetaSweep { theta: S, delta_c: S, delta_q: S },
}

impl<S: Scalar> Default for ScenarioSpec<S> {
    fn default() -> Self {
        ScenarioSpec::UniformClasses {
            classes: reference_classes(),
        }
    }
}

impl<S: Scalar> ScenarioSpec<S> {
    pub fn proportions(proportions: [f64; 3]) -> Self {
        ScenarioSpec::ProportionClasses {
            classes: reference_classes(),
            proportions: proportions.iter().map(|&p| S::lit(p)).collect(),
        }
    }

    pub fn theta(theta: f64) -> Self {
        ScenarioSpec::ThetaSweep {
            theta: S::lit(theta),
            delta_c: S::lit(DEFAULT_DELTA_C_MAH),
            delta_q: S::lit(DEFAULT_DELTA_Q_WH),
        }
    }

    /// The six heterogeneity scenarios run by `sweep`.
    pub fn sweep_set() -> Vec<Self> {
        vec![
            Self::proportions([0.5, 0.25, 0.25]),
            Self::proportions([0.25, 0.5, 0.25]),
            Self::proportions([0.25, 0.25, 0.5]),
            Self::theta(0.5),
            Self::theta(1.5),
            Self::theta(2.0),
        ]
    }

    /// Short identifier used for output directories.
    pub fn label(&self) -> String {
        match self {
            ScenarioSpec::UniformClasses { .. } => "uniform".to_owned(),
            ScenarioSpec::ProportionClasses { proportions, .. } => {
                let parts: Vec<String> = proportions
                    .iter()
                    .map(|p| format!("{}", (p.as_f64() * 100.0).round()))
                    .collect();
                format!("proportions_{}", parts.join("_"))
            }
            ScenarioSpec::ThetaSweep { theta, .. } => format!("theta_{theta}"),
        }
    }

    pub fn cast<T: Scalar>(&self) -> ScenarioSpec<T> {
        let c = |v: S| T::lit(v.as_f64());
        let classes = |cs: &[DeviceClass<S>]| {
            cs.iter()
                .map(|k| DeviceClass {
                    capacity_mah: c(k.capacity_mah),
                    qi_capacity_wh: c(k.qi_capacity_wh),
                })
                .collect()
        };
        match self {
            ScenarioSpec::UniformClasses { classes: cs } => ScenarioSpec::UniformClasses {
                classes: classes(cs),
            },
            ScenarioSpec::ProportionClasses {
                classes: cs,
                proportions,
            } => ScenarioSpec::ProportionClasses {
                classes: classes(cs),
                proportions: proportions.iter().map(|&p| c(p)).collect(),
            },
            ScenarioSpec::ThetaSweep {
                theta,
                delta_c,
                delta_q,
            } => ScenarioSpec::ThetaSweep {
                theta: c(*theta),
                delta_c: c(*delta_c),
                delta_q: c(*delta_q),
            },
        }
    }
}

impl<S: Scalar> fmt::Display for ScenarioSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Device profiles of every class with the share of nodes each receives.
pub fn scenario_classes<S: Scalar>(spec: &ScenarioSpec<S>) -> Result<Vec<(DeviceProfile<S>, S)>> {
    let (classes, fractions): (Vec<DeviceClass<S>>, Vec<S>) = match spec {
        ScenarioSpec::UniformClasses { classes } => {
            if classes.is_empty() {
                return Err(Error::InvalidScenario("no device classes".into()));
            }
            let share = S::one() / S::from_count(classes.len());
            (classes.clone(), vec![share; classes.len()])
        }
        ScenarioSpec::ProportionClasses {
            classes,
            proportions,
        } => {
            if classes.is_empty() {
                return Err(Error::InvalidScenario("no device classes".into()));
            }
            if proportions.len() != classes.len() {
                return Err(Error::InvalidScenario(format!(
                    "{} proportions for {} classes",
                    proportions.len(),
                    classes.len()
                )));
            }
            if proportions.iter().any(|p| !(*p >= S::zero())) {
                return Err(Error::InvalidScenario("proportions must be non-negative".into()));
            }
            let sum: f64 = proportions.iter().map(|p| p.as_f64()).sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidScenario(format!(
                    "proportions must sum to 1, got {sum}"
                )));
            }
            (classes.clone(), proportions.clone())
        }
        ScenarioSpec::ThetaSweep {
            theta,
            delta_c,
            delta_q,
        } => {
            let (c0, q0) = (S::lit(4500.0), S::lit(4.0));
            let (dc, dq) = (*theta * *delta_c, *theta * *delta_q);
            let classes = vec![
                DeviceClass {
                    capacity_mah: c0 + dc,
                    qi_capacity_wh: q0 + dq,
                },
                DeviceClass {
                    capacity_mah: c0,
                    qi_capacity_wh: q0,
                },
                DeviceClass {
                    capacity_mah: c0 - dc,
                    qi_capacity_wh: q0 - dq,
                },
            ];
            let share = S::one() / S::lit(3.0);
            (classes, vec![share; 3])
        }
    };
    classes
        .iter()
        .zip(fractions)
        .map(|(class, fraction)| Ok((class.profile()?, fraction)))
        .collect()
}

/// Largest-remainder apportionment of `total` items over `fractions`.
/// Remainder ties go to the lower class index.
pub fn allocate_counts(fractions: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = fractions.iter().sum();
    let quotas: Vec<f64> = fractions.iter().map(|f| f / sum * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut by_remainder: Vec<usize> = (0..fractions.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in by_remainder.iter().take(total.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    counts
}

/// One profile per node: exact class counts, shuffled across node ids.
pub fn assign_profiles<S: Scalar, R: Rng + ?Sized>(
    classes: &[(DeviceProfile<S>, S)],
    num_nodes: usize,
    rng: &mut R,
) -> Vec<DeviceProfile<S>> {
    let fractions: Vec<f64> = classes.iter().map(|(_, f)| f.as_f64()).collect();
    let counts = allocate_counts(&fractions, num_nodes);
    let mut profiles: Vec<DeviceProfile<S>> = classes
        .iter()
        .zip(&counts)
        .flat_map(|((p, _), &n)| std::iter::repeat_n(*p, n))
        .collect();
    profiles.shuffle(rng);
    profiles
}
