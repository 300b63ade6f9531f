use crate::designs::{Decision, DecisionReason, DesignKind, DesignSpec};
use crate::error::{Error, Result};
use crate::model::{fhat, monotonize, Level, TrialState};
use crate::scalar::{argmin_by, Scalar};

/// Point rule: allocate the level whose isotonic estimate is nearest `p`,
/// escalating past the highest tried level while it is still below `p` and
/// de-escalating below the lowest tried level while it is above `p`.
pub fn point_next_dose(state: &TrialState, spec: &DesignSpec) -> Result<Level> {
    spec.check_levels(state.m())?;
    decide(state, spec).map(|d| d.next)
}

pub(super) fn decide(state: &TrialState, spec: &DesignSpec) -> Result<Decision> {
    if !matches!(spec.kind(), DesignKind::Point) {
        return Err(Error::InvalidDesign("not a point design".into()));
    }
    let est = monotonize(&fhat(state)).map_err(|_| Error::PointNeedsData)?;
    let p = spec.target();
    let m = state.m();
    let (highest, top) = est.highest_defined().expect("at least one defined level");
    if top < p {
        return Ok(Decision {
            next: highest.up(m),
            reason: DecisionReason::PointEscalate { highest, estimate: top, at_top: highest.get() == m },
        });
    }
    let (lowest, bottom) = est.lowest_defined().expect("at least one defined level");
    if bottom > p {
        return Ok(Decision {
            next: lowest.down(),
            reason: DecisionReason::PointDeescalate { lowest, estimate: bottom, at_bottom: lowest.get() == 1 },
        });
    }
    let defined: Vec<_> = est.defined().collect();
    let i = argmin_by(defined.iter(), |(_, e)| e.distance(p)).expect("non-empty");
    let (level, estimate) = defined[i];
    Ok(Decision { next: level, reason: DecisionReason::PointNearest { level, estimate } })
}
