use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::designs::{next_dose, recommend_mtd, DesignSpec};
use crate::error::{Error, Result};
use crate::model::{Level, ToxScenario, TrialState};
use crate::rng::rng_from_seed;

/// A seeded realisation of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTrace {
    pub scenario_id: Option<String>,
    pub spec: DesignSpec,
    pub seed: u64,
    pub final_state: TrialState,
    pub recommended: Level,
}

impl TrialTrace {
    pub fn len(&self) -> usize {
        self.final_state.total()
    }

    pub fn is_empty(&self) -> bool {
        self.final_state.is_empty()
    }

    pub fn doses(&self) -> impl ExactSizeIterator<Item = Level> + '_ {
        self.final_state.history().iter().map(|o| o.dose)
    }

    pub fn outcomes(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        self.final_state.history().iter().map(|o| o.toxic)
    }
}

/// Run `n` subjects through `spec` on the true curve `scenario`.
///
/// Cohorts of `spec.cohort()` subjects share one dose; the last cohort is cut
/// short if `n` is not a multiple of the cohort size. Each subject consumes
/// exactly one uniform draw, toxic iff `u < f[dose]`, so two designs run with
/// the same seed see the same sequence of uniforms.
pub fn run_trial(scenario: &ToxScenario<f64>, spec: &DesignSpec, n: usize, seed: u64) -> Result<TrialTrace> {
    if n == 0 {
        return Err(Error::Precondition("a trial needs at least one subject".into()));
    }
    spec.check_levels(scenario.m())?;
    let mut rng = rng_from_seed(seed);
    let mut state = TrialState::new(scenario.m(), spec.start())?;
    let mut cohort = Vec::with_capacity(spec.cohort());
    while state.total() < n {
        let dose = next_dose(&state, spec)?;
        let k = spec.cohort().min(n - state.total());
        let f = scenario.rate(dose);
        cohort.clear();
        cohort.extend((0..k).map(|_| rng.random::<f64>() < f));
        state.record_cohort(dose, &cohort)?;
    }
    let recommended = recommend_mtd(&state, spec)?;
    Ok(TrialTrace {
        scenario_id: scenario.label().map(str::to_owned),
        spec: spec.clone(),
        seed,
        final_state: state,
        recommended,
    })
}
