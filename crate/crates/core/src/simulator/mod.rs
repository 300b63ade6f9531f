//! Seeded Monte Carlo trials and empirical convergence diagnostics.

mod counterexample;
mod empirics;
mod limit;
mod table1;
mod trial;

pub use counterexample::{canonical_path_probability, counterexample_point, is_trapped, CounterexampleReport};
pub use empirics::{
    convergence_empirics, ClassSummary, EmpiricsConfig, EmpiricsReport, ReplicationOutcome, ScenarioEmpirics,
    LEMMA1_TOLERANCE,
};
pub use limit::{
    estimate_limit_set, lemma1_check, LevelError, LimitSetEstimate, DEFAULT_LEMMA1_THRESHOLD, DEFAULT_TAIL_FRACTION,
};
pub use table1::{classify_scenario, table1_crosstab, CrossTab, ScenarioClassification, Table1};
pub use trial::{run_trial, TrialTrace};
