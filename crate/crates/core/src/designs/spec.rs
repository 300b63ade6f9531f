use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Level;
use crate::rational::{decimal, to_f64};
use crate::Rational;

pub const DEFAULT_THETA_BOUNDS: (f64, f64) = (-10.0, 10.0);

/// Which allocation rule drives the trial, with its rule-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DesignKind {
    /// Repeat, escalate or de-escalate by comparing the current level's
    /// estimate to `(p - dp1, p + dp2)`.
    Interval {
        #[serde(with = "decimal")]
        dp1: Rational,
        #[serde(with = "decimal")]
        dp2: Rational,
        /// Read the isotonic fit at the current level instead of the raw frequency.
        #[serde(default)]
        monotonized: bool,
    },
    /// Allocate the level whose isotonic estimate is nearest the target.
    Point,
    /// Power-model CRM fitted by bounded maximum likelihood.
    Crm {
        skeleton: Vec<f64>,
        #[serde(default = "default_theta_lo")]
        theta_lo: f64,
        #[serde(default = "default_theta_hi")]
        theta_hi: f64,
        #[serde(default)]
        no_skipping: bool,
    },
}

fn default_theta_lo() -> f64 {
    DEFAULT_THETA_BOUNDS.0
}

fn default_theta_hi() -> f64 {
    DEFAULT_THETA_BOUNDS.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DesignSpec {
    kind: DesignKind,
    target: Rational,
    cohort: usize,
    start: Level,
}

impl DesignSpec {
    pub fn new(kind: DesignKind, target: Rational) -> Result<Self> {
        let spec = DesignSpec { kind, target, cohort: 1, start: Level::LOWEST };
        spec.check()?;
        Ok(spec)
    }

    pub fn interval(target: Rational, dp1: Rational, dp2: Rational) -> Result<Self> {
        Self::new(DesignKind::Interval { dp1, dp2, monotonized: false }, target)
    }

    pub fn point(target: Rational) -> Result<Self> {
        Self::new(DesignKind::Point, target)
    }

    pub fn crm(target: Rational, skeleton: Vec<f64>) -> Result<Self> {
        let (theta_lo, theta_hi) = DEFAULT_THETA_BOUNDS;
        Self::new(DesignKind::Crm { skeleton, theta_lo, theta_hi, no_skipping: false }, target)
    }

    pub fn with_cohort(mut self, k: usize) -> Result<Self> {
        self.cohort = k;
        self.check()?;
        Ok(self)
    }

    pub fn with_start(mut self, start: Level) -> Result<Self> {
        self.start = start;
        self.check()?;
        Ok(self)
    }

    pub fn with_monotonized_interval(mut self, on: bool) -> Self {
        if let DesignKind::Interval { monotonized, .. } = &mut self.kind {
            *monotonized = on;
        }
        self
    }

    pub fn with_no_skipping(mut self, on: bool) -> Self {
        if let DesignKind::Crm { no_skipping, .. } = &mut self.kind {
            *no_skipping = on;
        }
        self
    }

    pub fn with_theta_bounds(mut self, lo: f64, hi: f64) -> Result<Self> {
        if let DesignKind::Crm { theta_lo, theta_hi, .. } = &mut self.kind {
            *theta_lo = lo;
            *theta_hi = hi;
        }
        self.check()?;
        Ok(self)
    }

    pub fn kind(&self) -> &DesignKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            DesignKind::Interval { .. } => "interval",
            DesignKind::Point => "point",
            DesignKind::Crm { .. } => "crm",
        }
    }

    pub fn target(&self) -> Rational {
        self.target
    }

    pub fn target_f64(&self) -> f64 {
        to_f64(self.target)
    }

    pub fn cohort(&self) -> usize {
        self.cohort
    }

    pub fn start(&self) -> Level {
        self.start
    }

    /// `(p - dp1, p + dp2)` for interval designs.
    pub fn interval_bounds(&self) -> Option<(Rational, Rational)> {
        match self.kind {
            DesignKind::Interval { dp1, dp2, .. } => Some((self.target - dp1, self.target + dp2)),
            _ => None,
        }
    }

    /// Check that the design fits a grid of `m` levels.
    pub fn check_levels(&self, m: usize) -> Result<()> {
        if self.start.get() > m {
            return Err(Error::InvalidDesign(format!("start level {} exceeds m = {m}", self.start)));
        }
        if let DesignKind::Crm { skeleton, .. } = &self.kind {
            if skeleton.len() != m {
                return Err(Error::InvalidDesign(format!(
                    "skeleton has {} entries but the grid has {m} levels",
                    skeleton.len()
                )));
            }
        }
        Ok(())
    }

    fn check(&self) -> Result<()> {
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        if !(self.target > zero && self.target < one) {
            return Err(Error::InvalidDesign(format!("target p = {} must lie in (0, 1)", to_f64(self.target))));
        }
        if self.cohort == 0 {
            return Err(Error::InvalidDesign("cohort size must be at least 1".into()));
        }
        match &self.kind {
            DesignKind::Interval { dp1, dp2, .. } => {
                if *dp1 <= zero || *dp2 <= zero {
                    return Err(Error::InvalidDesign("dp1 and dp2 must be positive".into()));
                }
                if self.target - dp1 <= zero || self.target + dp2 >= one {
                    return Err(Error::InvalidDesign(format!(
                        "interval ({}, {}) must lie inside (0, 1)",
                        to_f64(self.target - dp1),
                        to_f64(self.target + dp2)
                    )));
                }
            }
            DesignKind::Point => {}
            DesignKind::Crm { skeleton, theta_lo, theta_hi, .. } => {
                check_skeleton(skeleton)?;
                if !(*theta_lo < 0.0 && 0.0 < *theta_hi) || !theta_lo.is_finite() || !theta_hi.is_finite() {
                    return Err(Error::InvalidDesign(format!(
                        "theta bounds [{theta_lo}, {theta_hi}] must straddle 0"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn check_skeleton(skeleton: &[f64]) -> Result<()> {
    if skeleton.is_empty() {
        return Err(Error::InvalidDesign("skeleton is empty".into()));
    }
    for (i, &s) in skeleton.iter().enumerate() {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidDesign(format!("skeleton[{}] = {s} must lie in (0, 1)", i + 1)));
        }
    }
    for (i, w) in skeleton.windows(2).enumerate() {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidDesign(format!(
                "skeleton must be strictly increasing: skeleton[{}] = {} >= skeleton[{}] = {}",
                i + 1,
                w[0],
                i + 2,
                w[1]
            )));
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(flatten)]
    kind: DesignKind,
    #[serde(with = "decimal")]
    target: Rational,
    #[serde(default = "one")]
    cohort: usize,
    #[serde(default = "lowest")]
    start: Level,
}

fn one() -> usize {
    1
}

fn lowest() -> Level {
    Level::LOWEST
}

impl From<DesignSpec> for RawSpec {
    fn from(s: DesignSpec) -> Self {
        RawSpec { kind: s.kind, target: s.target, cohort: s.cohort, start: s.start }
    }
}

impl TryFrom<RawSpec> for DesignSpec {
    type Error = Error;

    fn try_from(r: RawSpec) -> Result<Self> {
        if r.start.get() == 0 {
            return Err(Error::InvalidDesign("start level must be at least 1".into()));
        }
        let spec = DesignSpec { kind: r.kind, target: r.target, cohort: r.cohort, start: r.start };
        spec.check()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::from_decimal as q;

    #[test]
    fn validates_parameters() {
        assert!(DesignSpec::interval(q(0.3), q(0.1), q(0.1)).is_ok());
        assert!(DesignSpec::interval(q(0.3), q(0.3), q(0.1)).is_err());
        assert!(DesignSpec::interval(q(0.3), q(0.1), q(0.7)).is_err());
        assert!(DesignSpec::interval(q(0.3), q(0.0), q(0.1)).is_err());
        assert!(DesignSpec::crm(q(0.3), vec![0.1, 0.1]).is_err());
        assert!(DesignSpec::crm(q(0.3), vec![0.1, 0.2]).unwrap().with_theta_bounds(0.5, 1.0).is_err());
        assert!(DesignSpec::point(q(0.3)).unwrap().with_cohort(0).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let spec = DesignSpec::interval(q(0.3), q(0.1), q(0.1)).unwrap().with_cohort(3).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<DesignSpec>(&text).unwrap(), spec);

        let crm: DesignSpec =
            serde_json::from_str(r#"{"kind":"crm","skeleton":[0.05,0.1,0.2],"target":0.3}"#).unwrap();
        assert_eq!(crm.cohort(), 1);
        assert_eq!(crm.start(), Level::LOWEST);
        assert!(serde_json::from_str::<DesignSpec>(r#"{"kind":"point","target":1.3}"#).is_err());
        assert!(serde_json::from_str::<DesignSpec>(r#"{"kind":"point","target":0.3,"start":0}"#).is_err());
    }
}
