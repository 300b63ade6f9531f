//! Dose-finding designs that allocate from cumulative toxicity estimates.
//!
//! Three allocation rules are provided: the interval rule (cumulative cohort
//! design), the point rule, and a power-model CRM fitted by bounded maximum
//! likelihood. Alongside them sit deterministic classifiers predicting each
//! rule's long-run allocation behaviour from a known dose-toxicity curve, a
//! bounded-Dirichlet scenario generator, and a seeded, thread-count
//! independent Monte Carlo simulator for checking those predictions.
//!
//! Numeric kernels are generic over [`Scalar`] (or [`Real`] where logs and
//! powers are needed). Toxicity estimates, targets and interval endpoints are
//! exact [`Rational`]s so that boundary comparisons are never subject to
//! rounding.

pub mod convergence;
pub mod designs;
mod error;
pub mod model;
pub mod rational;
pub mod rng;
pub mod scalar;
pub mod scenario_gen;
pub mod simulator;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub use convergence::{ccd_classify, crm_classify, crm_nominations, misspec_distance, CcdClass, CrmClass};
pub use designs::{decide, next_dose, recommend_mtd, Decision, DecisionReason, DesignKind, DesignSpec};
pub use model::{fhat, monotonize, mtd_index, EstimateVector, Level, Observation, ToxScenario, TrialState};

/// Exact fraction used for estimates and design thresholds.
pub type Rational = num_rational::Ratio<i64>;

/// Floating-point scenario, the working type for simulation.
pub type Scenario = ToxScenario<f64>;
/// Scenario with exact rates, for boundary-sensitive classification.
pub type ExactScenario = ToxScenario<Rational>;
/// Nomination table in `f64`.
pub type Nominations = convergence::NominationTable<f64>;
