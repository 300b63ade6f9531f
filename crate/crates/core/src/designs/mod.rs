//! Sequential allocation rules and MTD recommendation.
//!
//! Every rule is a pure function of the trial state and the design. The
//! decision for the next cohort is made right after the latest cohort is
//! recorded, so `state.current()` is the level just administered. Before any
//! data exists all rules return the current (start) level unchanged.

pub mod crm;
mod interval;
pub mod optimize;
mod point;
mod spec;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::model::{Level, TrialState};
use crate::rational::to_f64;
use crate::Rational;

pub use interval::interval_next_dose;
pub use point::point_next_dose;
pub use spec::{check_skeleton, DesignKind, DesignSpec, DEFAULT_THETA_BOUNDS};

/// A dose decision and the rule branch that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub next: Level,
    pub reason: DecisionReason,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecisionReason {
    NoData,
    IntervalInside { estimate: Rational, lower: Rational, upper: Rational },
    IntervalEscalate { estimate: Rational, lower: Rational, at_top: bool },
    IntervalDeescalate { estimate: Rational, upper: Rational, at_bottom: bool },
    PointNearest { level: Level, estimate: Rational },
    PointEscalate { highest: Level, estimate: Rational, at_top: bool },
    PointDeescalate { lowest: Level, estimate: Rational, at_bottom: bool },
    CrmNearest { theta: f64, predicted: f64 },
    CrmNoSkip { theta: f64, unconstrained: Level },
}

impl fmt::Display for DecisionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DecisionReason::*;
        let d = |r: &Rational| to_f64(*r);
        match self {
            NoData => write!(f, "no data yet: start dose"),
            IntervalInside { estimate, lower, upper } => {
                write!(f, "estimate {} inside ({}, {}): repeat dose", d(estimate), d(lower), d(upper))
            }
            IntervalEscalate { estimate, lower, at_top: false } => {
                write!(f, "estimate {} ≤ p-Δp1 ({}): escalate", d(estimate), d(lower))
            }
            IntervalEscalate { estimate, lower, at_top: true } => {
                write!(f, "estimate {} ≤ p-Δp1 ({}): already at top dose, repeat", d(estimate), d(lower))
            }
            IntervalDeescalate { estimate, upper, at_bottom: false } => {
                write!(f, "estimate {} ≥ p+Δp2 ({}): de-escalate", d(estimate), d(upper))
            }
            IntervalDeescalate { estimate, upper, at_bottom: true } => {
                write!(f, "estimate {} ≥ p+Δp2 ({}): already at lowest dose, repeat", d(estimate), d(upper))
            }
            PointNearest { level, estimate } => {
                write!(f, "monotonized estimate {} at level {level} is nearest the target", d(estimate))
            }
            PointEscalate { highest, estimate, at_top } => write!(
                f,
                "highest tried level {highest} has estimate {} < p: escalate{}",
                d(estimate),
                if *at_top { " (already at top dose)" } else { "" }
            ),
            PointDeescalate { lowest, estimate, at_bottom } => write!(
                f,
                "lowest tried level {lowest} has estimate {} > p: de-escalate{}",
                d(estimate),
                if *at_bottom { " (already at lowest dose)" } else { "" }
            ),
            CrmNearest { theta, predicted } => {
                write!(f, "fitted theta {theta:.6}: model rate {predicted:.4} is nearest the target")
            }
            CrmNoSkip { theta, unconstrained } => {
                write!(f, "fitted theta {theta:.6} points to level {unconstrained}: limited to one level per step")
            }
        }
    }
}

impl Serialize for DecisionReason {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Next dose under `spec`, with the branch that fired.
pub fn decide(state: &TrialState, spec: &DesignSpec) -> Result<Decision> {
    spec.check_levels(state.m())?;
    if state.is_empty() {
        return Ok(Decision { next: state.current(), reason: DecisionReason::NoData });
    }
    match spec.kind() {
        DesignKind::Interval { .. } => interval::decide(state, spec),
        DesignKind::Point => point::decide(state, spec),
        DesignKind::Crm { .. } => crm_decide(state, spec),
    }
}

pub fn next_dose(state: &TrialState, spec: &DesignSpec) -> Result<Level> {
    decide(state, spec).map(|d| d.next)
}

/// The level that would be allocated to one more cohort.
pub fn recommend_mtd(state: &TrialState, spec: &DesignSpec) -> Result<Level> {
    next_dose(state, spec)
}

/// Bounded MLE of the power-model parameter from the state's tallies.
pub fn crm_fit_theta(state: &TrialState, spec: &DesignSpec) -> Result<f64> {
    spec.check_levels(state.m())?;
    match spec.kind() {
        DesignKind::Crm { skeleton, theta_lo, theta_hi, .. } => {
            Ok(crm::fit_theta(skeleton, state.n(), state.tox(), *theta_lo, *theta_hi))
        }
        _ => Err(crate::Error::InvalidDesign("not a CRM design".into())),
    }
}

pub fn crm_next_dose(state: &TrialState, spec: &DesignSpec) -> Result<Level> {
    spec.check_levels(state.m())?;
    crm_decide(state, spec).map(|d| d.next)
}

fn crm_decide(state: &TrialState, spec: &DesignSpec) -> Result<Decision> {
    let DesignKind::Crm { skeleton, no_skipping, .. } = spec.kind() else {
        return Err(crate::Error::InvalidDesign("not a CRM design".into()));
    };
    let theta = crm_fit_theta(state, spec)?;
    let curve = crm::power_curve(skeleton, theta);
    let nearest = Level::from_index(crm::nearest_level(skeleton, theta, spec.target_f64()));
    let next = if *no_skipping { state.current().step_toward(nearest) } else { nearest };
    let reason = if next != nearest {
        DecisionReason::CrmNoSkip { theta, unconstrained: nearest }
    } else {
        DecisionReason::CrmNearest { theta, predicted: curve[nearest.index()] }
    };
    Ok(Decision { next, reason })
}
