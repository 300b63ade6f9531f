//! Cross-tabulation of CRM nomination classes against interval-design classes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::{
    ccd_classify, crm_classify, crm_nominations, misspec_distance, CcdClass, CcdVerdict, CrmClass, CrmVerdict,
};
use crate::error::{Error, Result};
use crate::model::{mtd_index, Level, ToxScenario};

/// Classification of one scenario under every interval width and the CRM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioClassification {
    pub mtd: Level,
    pub ccd: Vec<CcdVerdict>,
    pub crm: CrmVerdict,
    pub nominees: Vec<Level>,
    pub theta: Vec<f64>,
    pub misspec_distance: f64,
}

/// Counts for one interval width: rows follow [`CrmClass::ALL`], columns
/// [`CcdClass::ALL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTab {
    pub dp1: f64,
    pub dp2: f64,
    pub counts: [[usize; 3]; 5],
}

impl CrossTab {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    fn pct(&self, count: usize) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            100.0 * count as f64 / total as f64
        }
    }

    pub fn cell_percent(&self, crm: CrmClass, ccd: CcdClass) -> f64 {
        self.pct(self.counts[crm_row(crm)][ccd_col(ccd)])
    }

    pub fn ccd_margin(&self, ccd: CcdClass) -> f64 {
        self.pct(self.counts.iter().map(|row| row[ccd_col(ccd)]).sum())
    }

    pub fn crm_margin(&self, crm: CrmClass) -> f64 {
        self.pct(self.counts[crm_row(crm)].iter().sum())
    }
}

pub fn crm_row(c: CrmClass) -> usize {
    CrmClass::ALL.iter().position(|&x| x == c).expect("listed")
}

pub fn ccd_col(c: CcdClass) -> usize {
    CcdClass::ALL.iter().position(|&x| x == c).expect("listed")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub m: usize,
    pub p: f64,
    pub skeleton: Vec<f64>,
    pub tabs: Vec<CrossTab>,
    pub rows: Vec<ScenarioClassification>,
}

impl Table1 {
    pub fn scenarios(&self) -> usize {
        self.rows.len()
    }

    /// CRM margins do not depend on the interval width.
    pub fn crm_margin(&self, crm: CrmClass) -> f64 {
        let n = self.rows.len();
        if n == 0 {
            return 0.0;
        }
        100.0 * self.rows.iter().filter(|r| r.crm.class == crm).count() as f64 / n as f64
    }
}

pub fn classify_scenario(
    scenario: &ToxScenario<f64>,
    widths: &[(f64, f64)],
    skeleton: &[f64],
) -> Result<ScenarioClassification> {
    let mtd = mtd_index(scenario);
    let ccd = widths.iter().map(|&(a, b)| ccd_classify(scenario, a, b)).collect::<Result<Vec<_>>>()?;
    let table = crm_nominations(scenario, skeleton)?;
    let crm = crm_classify(&table, mtd);
    Ok(ScenarioClassification {
        mtd,
        ccd,
        crm,
        misspec_distance: misspec_distance(scenario, skeleton, mtd)?,
        nominees: table.nominee,
        theta: table.theta,
    })
}

/// Classify every scenario (all on the same grid, all retargeted to `p`)
/// and cross-tabulate.
pub fn table1_crosstab(
    ensemble: &[ToxScenario<f64>],
    widths: &[(f64, f64)],
    skeleton: &[f64],
    p: f64,
) -> Result<Table1> {
    let m = ensemble.first().ok_or_else(|| Error::Precondition("empty ensemble".into()))?.m();
    if ensemble.iter().any(|s| s.m() != m) {
        return Err(Error::Precondition("all scenarios must share one dose grid".into()));
    }
    let rows = ensemble
        .par_iter()
        .map(|sc| {
            let retargeted = ToxScenario::new(sc.rates().to_vec(), p)?;
            classify_scenario(&retargeted, widths, skeleton)
        })
        .collect::<Result<Vec<_>>>()?;
    let tabs = widths
        .iter()
        .enumerate()
        .map(|(w, &(dp1, dp2))| {
            let mut counts = [[0usize; 3]; 5];
            for r in &rows {
                counts[crm_row(r.crm.class)][ccd_col(r.ccd[w].class)] += 1;
            }
            CrossTab { dp1, dp2, counts }
        })
        .collect();
    Ok(Table1 { m, p, skeleton: skeleton.to_vec(), tabs, rows })
}
