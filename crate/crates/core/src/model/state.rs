use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Level;

/// One subject's allocation and binary toxicity outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub dose: Level,
    pub toxic: bool,
}

/// Allocation and outcome history of a trial, with per-level tallies.
///
/// `current` is the level most recently administered, or the start level
/// before any subject has been treated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct TrialState {
    n: Vec<u64>,
    tox: Vec<u64>,
    current: Level,
    history: Vec<Observation>,
}

impl TrialState {
    pub fn new(m: usize, start: Level) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidState("no dose levels".into()));
        }
        if start.get() > m {
            return Err(Error::InvalidState(format!("start level {start} exceeds m = {m}")));
        }
        Ok(TrialState { n: vec![0; m], tox: vec![0; m], current: start, history: Vec::new() })
    }

    /// Rebuild a state by folding `history` from `start`.
    pub fn replay(m: usize, start: Level, history: &[Observation]) -> Result<Self> {
        let mut state = TrialState::new(m, start)?;
        for obs in history {
            state.record(obs.dose, obs.toxic)?;
        }
        Ok(state)
    }

    pub fn record(&mut self, dose: Level, toxic: bool) -> Result<()> {
        if dose.get() > self.m() {
            return Err(Error::InvalidState(format!("dose level {dose} exceeds m = {}", self.m())));
        }
        let i = dose.index();
        self.n[i] += 1;
        self.tox[i] += u64::from(toxic);
        self.current = dose;
        self.history.push(Observation { dose, toxic });
        Ok(())
    }

    pub fn record_cohort(&mut self, dose: Level, outcomes: &[bool]) -> Result<()> {
        if dose.get() > self.m() {
            return Err(Error::InvalidState(format!("dose level {dose} exceeds m = {}", self.m())));
        }
        for &y in outcomes {
            self.record(dose, y)?;
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.n.len()
    }

    pub fn current(&self) -> Level {
        self.current
    }

    pub fn n(&self) -> &[u64] {
        &self.n
    }

    pub fn tox(&self) -> &[u64] {
        &self.tox
    }

    pub fn n_at(&self, level: Level) -> u64 {
        self.n[level.index()]
    }

    pub fn tox_at(&self, level: Level) -> u64 {
        self.tox[level.index()]
    }

    pub fn history(&self) -> &[Observation] {
        &self.history
    }

    pub fn total(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    /// The level the state started from, recovered from the history.
    pub fn first_dose(&self) -> Option<Level> {
        self.history.first().map(|o| o.dose)
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    m: usize,
    n: Vec<u64>,
    tox: Vec<u64>,
    current: Level,
    history: Vec<Observation>,
}

impl From<TrialState> for StateRepr {
    fn from(s: TrialState) -> Self {
        StateRepr { m: s.m(), n: s.n, tox: s.tox, current: s.current, history: s.history }
    }
}

impl TryFrom<StateRepr> for TrialState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        if r.n.len() != r.m || r.tox.len() != r.m {
            return Err(Error::InvalidState("count vectors do not match m".into()));
        }
        if r.tox.iter().zip(&r.n).any(|(t, n)| t > n) {
            return Err(Error::InvalidState("toxicity count exceeds subject count".into()));
        }
        if r.current.get() > r.m {
            return Err(Error::InvalidState("current level exceeds m".into()));
        }
        let start = r.history.first().map(|o| o.dose).unwrap_or(r.current);
        let rebuilt = TrialState::replay(r.m, start, &r.history)?;
        if rebuilt.n != r.n || rebuilt.tox != r.tox || (!r.history.is_empty() && rebuilt.current != r.current) {
            return Err(Error::InvalidState("counts are not reconstructible from history".into()));
        }
        Ok(TrialState { current: r.current, ..rebuilt })
    }
}
