//! Nomination analysis for the power-model CRM.
//!
//! Pinning the model to the true rate at level `u` fixes `θ_u`; the level the
//! pinned model then picks as MTD is the one `u` nominates. Convergence is
//! guaranteed when every level nominates the MTD.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::designs::crm::{nearest_level, power_rate};
use crate::error::{Error, Result};
use crate::model::{Level, ToxScenario};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominationTable<T> {
    pub theta: Vec<T>,
    pub nominee: Vec<Level>,
}

impl<T> NominationTable<T> {
    pub fn m(&self) -> usize {
        self.nominee.len()
    }

    pub fn nominee_of(&self, level: Level) -> Level {
        self.nominee[level.index()]
    }

    /// Levels that nominate themselves.
    pub fn self_nominators(&self) -> Vec<Level> {
        self.nominee
            .iter()
            .enumerate()
            .filter(|(i, n)| n.index() == *i)
            .map(|(i, _)| Level::from_index(i))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrmClass {
    /// The MTD does not nominate itself.
    No0,
    /// Some other level nominates itself.
    No2plus,
    /// Funneling towards the MTD, but not every level nominates it.
    Funneling,
    /// Every level nominates the MTD.
    Yes,
    /// None of the above.
    NoFunneling,
}

impl CrmClass {
    /// Display order of the cross-tabulation rows.
    pub const ALL: [CrmClass; 5] =
        [CrmClass::No0, CrmClass::No2plus, CrmClass::Funneling, CrmClass::Yes, CrmClass::NoFunneling];
}

impl fmt::Display for CrmClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrmClass::No0 => "No: 0",
            CrmClass::No2plus => "No: 2+",
            CrmClass::Funneling => "Funneling",
            CrmClass::Yes => "Yes",
            CrmClass::NoFunneling => "No Funneling",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrmVerdict {
    pub class: CrmClass,
    pub self_nominators: Vec<Level>,
}

/// `θ_u = ln(ln f_u / ln s_u)` and the resulting nominees.
pub fn crm_nominations<T: Real>(scenario: &ToxScenario<T>, skeleton: &[T]) -> Result<NominationTable<T>> {
    if skeleton.len() != scenario.m() {
        return Err(Error::InvalidDesign(format!(
            "skeleton has {} entries but the scenario has {} levels",
            skeleton.len(),
            scenario.m()
        )));
    }
    for (i, &s) in skeleton.iter().enumerate() {
        if !(s > T::zero() && s < T::one()) {
            return Err(Error::InvalidDesign(format!("skeleton[{}] must lie in (0, 1)", i + 1)));
        }
    }
    let p = scenario.target();
    let theta: Vec<T> = scenario.rates().iter().zip(skeleton).map(|(&f, &s)| (f.ln() / s.ln()).ln()).collect();
    let nominee = theta.iter().map(|&th| Level::from_index(nearest_level(skeleton, th, p))).collect();
    Ok(NominationTable { theta, nominee })
}

/// Cheung-Chappell funneling: the MTD nominates itself, lower levels
/// nominate higher, higher levels nominate lower.
pub fn funneling_holds<T>(table: &NominationTable<T>, u_star: Level) -> bool {
    table.nominee.iter().enumerate().all(|(i, nom)| {
        let u = Level::from_index(i);
        match u.cmp(&u_star) {
            std::cmp::Ordering::Less => *nom > u,
            std::cmp::Ordering::Equal => *nom == u,
            std::cmp::Ordering::Greater => *nom < u,
        }
    })
}

/// First matching class in the order Yes, No0, No2plus, Funneling, NoFunneling.
pub fn crm_classify<T>(table: &NominationTable<T>, u_star: Level) -> CrmVerdict {
    let self_nominators = table.self_nominators();
    let class = if table.nominee.iter().all(|&n| n == u_star) {
        CrmClass::Yes
    } else if table.nominee_of(u_star) != u_star {
        CrmClass::No0
    } else if self_nominators.iter().any(|&u| u != u_star) {
        CrmClass::No2plus
    } else if funneling_holds(table, u_star) {
        CrmClass::Funneling
    } else {
        CrmClass::NoFunneling
    };
    CrmVerdict { class, self_nominators }
}

/// Largest gap `max_u |f_u - G(d_u; θ_{u*})|` between the truth and the
/// model pinned at the MTD.
pub fn misspec_distance<T: Real>(scenario: &ToxScenario<T>, skeleton: &[T], u_star: Level) -> Result<T> {
    let table = crm_nominations(scenario, skeleton)?;
    let theta = table.theta[u_star.index()];
    Ok(scenario
        .rates()
        .iter()
        .zip(skeleton)
        .map(|(&f, &s)| (f - power_rate(s, theta)).abs())
        .fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SKEL: [f64; 5] = [0.05, 0.1, 0.2, 0.4, 0.8];

    fn table(nominee: &[usize]) -> NominationTable<f64> {
        NominationTable { theta: vec![0.0; nominee.len()], nominee: nominee.iter().map(|&u| Level::new(u)).collect() }
    }

    #[test]
    fn correct_specification_nominates_level_three() {
        let sc = ToxScenario::new(SKEL.to_vec(), 0.3).unwrap();
        let t = crm_nominations(&sc, &SKEL).unwrap();
        assert!(t.theta.iter().all(|th| th.abs() < 1e-12));
        assert!(t.nominee.iter().all(|&n| n == Level::new(3)));
    }

    #[test]
    fn misspecified_nominations() {
        let sc = ToxScenario::new(vec![0.3, 0.5, 0.7], 0.3).unwrap();
        let t = crm_nominations(&sc, &[0.1, 0.2, 0.4]).unwrap();
        assert!((t.theta[0] - (0.3f64.ln() / 0.1f64.ln()).ln()).abs() < 1e-12);
        assert!((t.theta[0] + 0.648).abs() < 1e-3);
        assert_eq!(t.nominee[0], Level::new(1));
    }

    #[test]
    fn pinned_level_has_zero_theta() {
        let sc = ToxScenario::new(vec![0.1, 0.25, 0.6], 0.3).unwrap();
        let t = crm_nominations(&sc, &[0.05, 0.25, 0.5]).unwrap();
        assert_eq!(t.theta[1], 0.0);
    }

    #[test]
    fn classification_precedence() {
        let u2 = Level::new(2);
        assert_eq!(crm_classify(&table(&[2, 2, 2]), u2).class, CrmClass::Yes);
        assert!(funneling_holds(&table(&[2, 2, 2]), u2));
        assert_eq!(crm_classify(&table(&[2, 3, 2]), u2).class, CrmClass::No0);
        let v = crm_classify(&table(&[1, 2, 2]), u2);
        assert_eq!(v.class, CrmClass::No2plus);
        assert_eq!(v.self_nominators, vec![Level::new(1), u2]);
        assert_eq!(crm_classify(&table(&[3, 2, 1, 3]), Level::new(2)).class, CrmClass::Funneling);
        // level 4 sits above the MTD but nominates level 5
        assert_eq!(crm_classify(&table(&[2, 2, 1, 5, 4]), u2).class, CrmClass::NoFunneling);
    }

    #[test]
    fn misspec_distance_examples() {
        let sc = ToxScenario::new(SKEL.to_vec(), 0.3).unwrap();
        assert!(misspec_distance(&sc, &SKEL, Level::new(3)).unwrap() < 1e-12);
        let sc = ToxScenario::new(vec![0.1, 0.3, 0.5], 0.3).unwrap();
        let d: f64 = misspec_distance(&sc, &[0.1, 0.3, 0.9], Level::new(2)).unwrap();
        assert!((d - 0.4).abs() < 1e-12);
    }
}
