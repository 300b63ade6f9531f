use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::pava::isotonic_increasing;
use crate::model::{Level, TrialState};
use crate::rational::{ratio, to_f64};
use crate::Rational;

/// Per-level toxicity frequency estimates. `None` marks an untried level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateVector {
    pub value: Vec<Option<Rational>>,
    pub weight: Vec<u64>,
}

impl EstimateVector {
    pub fn m(&self) -> usize {
        self.value.len()
    }

    pub fn at(&self, level: Level) -> Option<Rational> {
        self.value[level.index()]
    }

    pub fn defined(&self) -> impl Iterator<Item = (Level, Rational)> + '_ {
        self.value.iter().enumerate().filter_map(|(i, v)| v.map(|v| (Level::from_index(i), v)))
    }

    pub fn lowest_defined(&self) -> Option<(Level, Rational)> {
        self.defined().next()
    }

    pub fn highest_defined(&self) -> Option<(Level, Rational)> {
        self.defined().last()
    }

    pub fn to_f64(&self) -> Vec<Option<f64>> {
        self.value.iter().map(|v| v.map(to_f64)).collect()
    }
}

/// Raw binomial frequency at each level: toxicities over subjects treated.
pub fn fhat(state: &TrialState) -> EstimateVector {
    EstimateVector {
        value: state
            .n()
            .iter()
            .zip(state.tox())
            .map(|(&n, &t)| (n > 0).then(|| ratio(t, n)))
            .collect(),
        weight: state.n().to_vec(),
    }
}

/// Weighted isotonic fit over the defined entries. Undefined entries are
/// skipped, so pooling runs across gaps in the tried levels.
pub fn monotonize(est: &EstimateVector) -> Result<EstimateVector> {
    let (idx, (vals, wts)): (Vec<usize>, (Vec<Rational>, Vec<Rational>)) = est
        .value
        .iter()
        .zip(&est.weight)
        .enumerate()
        .filter_map(|(i, (v, &w))| v.map(|v| (i, (v, Rational::from_integer(w as i64)))))
        .unzip();
    if idx.is_empty() {
        return Err(Error::NoData);
    }
    if wts.iter().any(|w| *w <= Rational::from_integer(0)) {
        return Err(Error::InvalidState("defined estimate with zero weight".into()));
    }
    let fit = isotonic_increasing(&vals, &wts);
    let mut value = vec![None; est.m()];
    for (i, y) in idx.into_iter().zip(fit) {
        value[i] = Some(y);
    }
    Ok(EstimateVector { value, weight: est.weight.clone() })
}
