//! Finite-horizon checks of the interval design's asymptotic behaviour.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::{ccd_classify, CcdClass, CcdVerdict};
use crate::designs::{DesignKind, DesignSpec};
use crate::error::{Error, Result};
use crate::model::{fhat, ToxScenario};
use crate::rational::to_f64;
use crate::rng::{derive_seed, TAG_TRIAL};
use crate::simulator::{estimate_limit_set, run_trial};

/// Estimate error below which the MTD estimate counts as consistent.
pub const LEMMA1_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricsConfig {
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub tail_fraction: f64,
}

/// One replication, reduced to what the aggregates need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub settled_at_mtd: bool,
    pub matches_oscillation: bool,
    pub settled_in_interval: bool,
    pub mtd_estimate_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEmpirics {
    pub id: u64,
    pub verdict: CcdVerdict,
    pub replications: usize,
    pub settled_at_mtd: f64,
    pub matches_oscillation: f64,
    pub settled_in_interval: f64,
    /// Share of replications with `|F̂(mtd) - f(mtd)| < LEMMA1_TOLERANCE`.
    pub mtd_estimate_ok: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassSummary {
    pub scenarios: usize,
    pub settled_at_mtd: f64,
    pub matches_oscillation: f64,
    pub settled_in_interval: f64,
    pub mtd_estimate_ok: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricsReport {
    pub config: EmpiricsConfig,
    pub per_scenario: Vec<ScenarioEmpirics>,
    /// Scenario-averaged rates, keyed by interval-design verdict.
    pub by_class: BTreeMap<CcdClass, ClassSummary>,
}

fn replicate(
    id: u64,
    scenario: &ToxScenario<f64>,
    verdict: &CcdVerdict,
    spec: &DesignSpec,
    cfg: &EmpiricsConfig,
    rep: u64,
) -> Result<ReplicationOutcome> {
    let trace = run_trial(scenario, spec, cfg.n, derive_seed(cfg.seed, &[TAG_TRIAL, id, rep]))?;
    let limit = estimate_limit_set(&trace, cfg.tail_fraction);
    let mtd = verdict.mtd;
    let mtd_estimate_ok = fhat(&trace.final_state)
        .at(mtd)
        .is_some_and(|e| (to_f64(e) - scenario.rate(mtd)).abs() < LEMMA1_TOLERANCE);
    Ok(ReplicationOutcome {
        settled_at_mtd: limit.settled && limit.s1 == mtd,
        matches_oscillation: verdict.oscillation_pair == Some((limit.s1, limit.s2)),
        settled_in_interval: limit.settled && verdict.levels_in_interval.contains(&limit.s1),
        mtd_estimate_ok,
    })
}

/// Simulate every scenario `replications` times and tabulate how often the
/// tail of the trace matches the classifier's prediction.
pub fn convergence_empirics(
    ensemble: &[(u64, ToxScenario<f64>)],
    spec: &DesignSpec,
    cfg: EmpiricsConfig,
) -> Result<EmpiricsReport> {
    let DesignKind::Interval { dp1, dp2, .. } = spec.kind() else {
        return Err(Error::Precondition("convergence empirics are defined for interval designs".into()));
    };
    if cfg.replications == 0 || cfg.n == 0 {
        return Err(Error::Precondition("need at least one replication and one subject".into()));
    }
    let verdicts = ensemble
        .iter()
        .map(|(_, sc)| ccd_classify(sc, to_f64(*dp1), to_f64(*dp2)))
        .collect::<Result<Vec<_>>>()?;
    let reps = cfg.replications as u64;
    let outcomes = (0..ensemble.len() * cfg.replications)
        .into_par_iter()
        .map(|task| {
            let (i, rep) = (task / cfg.replications, task as u64 % reps);
            let (id, sc) = &ensemble[i];
            replicate(*id, sc, &verdicts[i], spec, &cfg, rep)
        })
        .collect::<Result<Vec<_>>>()?;

    let frac = |xs: &[ReplicationOutcome], f: fn(&ReplicationOutcome) -> bool| {
        xs.iter().filter(|x| f(x)).count() as f64 / xs.len() as f64
    };
    let per_scenario: Vec<ScenarioEmpirics> = ensemble
        .iter()
        .zip(verdicts)
        .zip(outcomes.chunks(cfg.replications))
        .map(|(((id, _), verdict), reps)| ScenarioEmpirics {
            id: *id,
            verdict,
            replications: reps.len(),
            settled_at_mtd: frac(reps, |r| r.settled_at_mtd),
            matches_oscillation: frac(reps, |r| r.matches_oscillation),
            settled_in_interval: frac(reps, |r| r.settled_in_interval),
            mtd_estimate_ok: frac(reps, |r| r.mtd_estimate_ok),
        })
        .collect();

    let mut by_class: BTreeMap<CcdClass, ClassSummary> = BTreeMap::new();
    for s in &per_scenario {
        let e = by_class.entry(s.verdict.class).or_default();
        e.scenarios += 1;
        e.settled_at_mtd += s.settled_at_mtd;
        e.matches_oscillation += s.matches_oscillation;
        e.settled_in_interval += s.settled_in_interval;
        e.mtd_estimate_ok += s.mtd_estimate_ok;
    }
    for e in by_class.values_mut() {
        let k = e.scenarios as f64;
        e.settled_at_mtd /= k;
        e.matches_oscillation /= k;
        e.settled_in_interval /= k;
        e.mtd_estimate_ok /= k;
    }
    Ok(EmpiricsReport { config: cfg, per_scenario, by_class })
}
