use crate::designs::{Decision, DecisionReason, DesignKind, DesignSpec};
use crate::error::{Error, Result};
use crate::model::{fhat, monotonize, Level, TrialState};
use crate::Rational;

/// Interval rule: compare the current level's cumulative estimate to
/// `(p - dp1, p + dp2)`. Inside repeats, at or below the lower end escalates,
/// at or above the upper end de-escalates; moves are one level and clamp at
/// the ends of the grid. An untried current level is kept.
pub fn interval_next_dose(state: &TrialState, spec: &DesignSpec) -> Result<Level> {
    spec.check_levels(state.m())?;
    decide(state, spec).map(|d| d.next)
}

pub(super) fn decide(state: &TrialState, spec: &DesignSpec) -> Result<Decision> {
    let DesignKind::Interval { monotonized, .. } = spec.kind() else {
        return Err(Error::InvalidDesign("not an interval design".into()));
    };
    let (lower, upper) = spec.interval_bounds().expect("interval design");
    let current = state.current();
    if state.n_at(current) == 0 {
        return Ok(Decision { next: current, reason: DecisionReason::NoData });
    }
    let estimate = if *monotonized {
        monotonize(&fhat(state))?.at(current).expect("current level has data")
    } else {
        Rational::new(state.tox_at(current) as i64, state.n_at(current) as i64)
    };
    let m = state.m();
    let decision = if estimate <= lower {
        Decision {
            next: current.up(m),
            reason: DecisionReason::IntervalEscalate { estimate, lower, at_top: current.get() == m },
        }
    } else if estimate >= upper {
        Decision {
            next: current.down(),
            reason: DecisionReason::IntervalDeescalate { estimate, upper, at_bottom: current.get() == 1 },
        }
    } else {
        Decision { next: current, reason: DecisionReason::IntervalInside { estimate, lower, upper } }
    };
    Ok(decision)
}
