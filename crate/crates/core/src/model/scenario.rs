use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Level;
use crate::scalar::{argmin_by, Scalar};

/// True dose-toxicity curve evaluated on the dose grid, with the target rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToxScenario<T> {
    f: Vec<T>,
    p: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl<T: Scalar> ToxScenario<T> {
    /// Strictly increasing curve with every rate inside `(0, 1)`, `m >= 2`.
    pub fn new(f: Vec<T>, p: T) -> Result<Self> {
        check_target(p)?;
        if f.len() < 2 {
            return Err(Error::InvalidScenario(format!("need at least 2 dose levels, got {}", f.len())));
        }
        for (i, &x) in f.iter().enumerate() {
            if !(x > T::zero() && x < T::one()) {
                return Err(Error::InvalidScenario(format!(
                    "f[{}] = {} must lie strictly inside (0, 1)",
                    i + 1,
                    x.as_f64()
                )));
            }
        }
        for (i, w) in f.windows(2).enumerate() {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidScenario(format!(
                    "f must be strictly increasing: f[{}] = {} >= f[{}] = {}",
                    i + 1,
                    w[0].as_f64(),
                    i + 2,
                    w[1].as_f64()
                )));
            }
        }
        Ok(ToxScenario { f, p, label: None })
    }

    /// Deterministic surrogate: rates may touch 0 or 1 and ties are allowed.
    /// Used for hand-traceable trials (e.g. `f = (0, 0, 1)`).
    pub fn surrogate(f: Vec<T>, p: T) -> Result<Self> {
        check_target(p)?;
        if f.is_empty() {
            return Err(Error::InvalidScenario("empty curve".into()));
        }
        for (i, &x) in f.iter().enumerate() {
            if x < T::zero() || x > T::one() {
                return Err(Error::InvalidScenario(format!("f[{}] = {} outside [0, 1]", i + 1, x.as_f64())));
            }
        }
        for (i, w) in f.windows(2).enumerate() {
            if w[1] < w[0] {
                return Err(Error::InvalidScenario(format!(
                    "f must be non-decreasing: f[{}] > f[{}]",
                    i + 1,
                    i + 2
                )));
            }
        }
        Ok(ToxScenario { f, p, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn m(&self) -> usize {
        self.f.len()
    }

    pub fn rates(&self) -> &[T] {
        &self.f
    }

    pub fn rate(&self, level: Level) -> T {
        self.f[level.index()]
    }

    pub fn target(&self) -> T {
        self.p
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn levels(&self) -> impl Iterator<Item = Level> {
        (0..self.m()).map(Level::from_index)
    }

    /// Lossy copy into `f64`, for the floating-point kernels.
    pub fn to_f64(&self) -> ToxScenario<f64> {
        ToxScenario {
            f: self.f.iter().map(|x| x.as_f64()).collect(),
            p: self.p.as_f64(),
            label: self.label.clone(),
        }
    }
}

fn check_target<T: Scalar>(p: T) -> Result<()> {
    if p > T::zero() && p < T::one() {
        Ok(())
    } else {
        Err(Error::InvalidScenario(format!("target p = {} must lie in (0, 1)", p.as_f64())))
    }
}

/// The MTD: the level whose true rate is nearest the target; ties go low.
pub fn mtd_index<T: Scalar>(scenario: &ToxScenario<T>) -> Level {
    let p = scenario.target();
    let i = argmin_by(scenario.rates().iter(), |&f| f.distance(p)).expect("non-empty curve");
    Level::from_index(i)
}
