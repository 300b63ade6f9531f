//! The point design's non-convergence trap.
//!
//! If the first cohort at the MTD is all toxic while the level below looks
//! safe, the MTD's estimate is pinned at 1. With `p < 1/2` every lower level
//! is then at least as close to the target, isotonic pooling cannot lower a
//! top estimate of 1, and the MTD is never allocated again.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::designs::{DesignKind, DesignSpec};
use crate::error::{Error, Result};
use crate::model::{mtd_index, Level, ToxScenario, TrialState};
use crate::rng::{derive_seed, TAG_TRIAL};
use crate::simulator::run_trial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub trap_level: Level,
    pub replications: usize,
    pub trapped: usize,
    pub trap_frequency: f64,
    /// Probability of the canonical trap path: every cohort from the start up
    /// to the level below the MTD toxicity-free, then one all-toxic cohort at
    /// the MTD.
    pub lower_bound: f64,
    pub mc_standard_error: f64,
}

/// Whether `state` shows the MTD trapped: it received exactly one full
/// cohort, all toxic, and the trial carried on elsewhere afterwards.
pub fn is_trapped(state: &TrialState, trap: Level, cohort: usize) -> bool {
    let visits: Vec<usize> = state
        .history()
        .iter()
        .enumerate()
        .filter(|(_, o)| o.dose == trap)
        .map(|(i, _)| i)
        .collect();
    visits.len() == cohort
        && visits.windows(2).all(|w| w[1] == w[0] + 1)
        && state.tox_at(trap) == cohort as u64
        && visits.last().is_some_and(|&last| last + 1 < state.total())
}

pub fn canonical_path_probability(scenario: &ToxScenario<f64>, start: Level, trap: Level, cohort: usize) -> f64 {
    let k = cohort as i32;
    let below: f64 = (start.index()..trap.index()).map(|i| (1.0 - scenario.rates()[i]).powi(k)).product();
    below * scenario.rate(trap).powi(k)
}

pub fn counterexample_point(
    scenario: &ToxScenario<f64>,
    spec: &DesignSpec,
    n: usize,
    replications: usize,
    seed: u64,
) -> Result<CounterexampleReport> {
    if !matches!(spec.kind(), DesignKind::Point) {
        return Err(Error::Precondition("the trap experiment needs a point design".into()));
    }
    let p = spec.target_f64();
    if !(p < 0.5) {
        return Err(Error::Precondition(format!("the trap needs p < 1/2, got {p}")));
    }
    if (scenario.target() - p).abs() > 1e-12 {
        return Err(Error::Precondition("scenario and design targets differ".into()));
    }
    if replications == 0 {
        return Err(Error::Precondition("need at least one replication".into()));
    }
    spec.check_levels(scenario.m())?;
    let trap = mtd_index(scenario);
    if spec.start() > trap {
        return Err(Error::Precondition(format!("start level {} is above the MTD {trap}", spec.start())));
    }
    if trap.get() > 1 && !(scenario.rate(Level::from_index(trap.index() - 1)) < p) {
        return Err(Error::Precondition("the level below the MTD must have rate < p".into()));
    }
    let k = spec.cohort();
    let trapped = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let trace = run_trial(scenario, spec, n, derive_seed(seed, &[TAG_TRIAL, 0, rep]))?;
            Ok(is_trapped(&trace.final_state, trap, k))
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&t| t)
        .count();
    let freq = trapped as f64 / replications as f64;
    Ok(CounterexampleReport {
        trap_level: trap,
        replications,
        trapped,
        trap_frequency: freq,
        lower_bound: canonical_path_probability(scenario, spec.start(), trap, k),
        mc_standard_error: (freq * (1.0 - freq) / replications as f64).sqrt(),
    })
}
