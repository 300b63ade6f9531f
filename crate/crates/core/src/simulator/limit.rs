use serde::{Deserialize, Serialize};

use crate::model::{fhat, Level, ToxScenario};
use crate::rational::to_f64;
use crate::simulator::TrialTrace;

pub const DEFAULT_TAIL_FRACTION: f64 = 0.1;
pub const DEFAULT_LEMMA1_THRESHOLD: u64 = 50;

/// Range of levels visited in the final stretch of a trace, standing in for
/// the set of levels visited infinitely often.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSetEstimate {
    pub s1: Level,
    pub s2: Level,
    pub settled: bool,
    pub tail_fraction: f64,
    /// Number of trailing subjects examined.
    pub window: usize,
}

impl LimitSetEstimate {
    pub fn contains(&self, level: Level) -> bool {
        self.s1 <= level && level <= self.s2
    }
}

/// Min and max level over the last `ceil(tail_fraction * n)` subjects.
pub fn estimate_limit_set(trace: &TrialTrace, tail_fraction: f64) -> LimitSetEstimate {
    assert!(!trace.is_empty(), "empty trace");
    assert!(tail_fraction > 0.0 && tail_fraction <= 1.0, "tail fraction must lie in (0, 1]");
    let n = trace.len();
    let window = ((tail_fraction * n as f64).ceil() as usize).clamp(1, n);
    let tail = &trace.final_state.history()[n - window..];
    let s1 = tail.iter().map(|o| o.dose).min().expect("non-empty tail");
    let s2 = tail.iter().map(|o| o.dose).max().expect("non-empty tail");
    LimitSetEstimate { s1, s2, settled: s1 == s2, tail_fraction, window }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelError {
    pub level: Level,
    pub n: u64,
    pub estimate: f64,
    pub error: f64,
}

/// `|F̂(d_u) - f_u|` for every level with at least `threshold` subjects.
pub fn lemma1_check(trace: &TrialTrace, scenario: &ToxScenario<f64>, threshold: u64) -> Vec<LevelError> {
    let state = &trace.final_state;
    let est = fhat(state);
    scenario
        .levels()
        .filter(|&u| state.n_at(u) >= threshold.max(1))
        .map(|u| {
            let estimate = to_f64(est.at(u).expect("level has data"));
            LevelError { level: u, n: state.n_at(u), estimate, error: (estimate - scenario.rate(u)).abs() }
        })
        .collect()
}
