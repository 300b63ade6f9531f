//! Plain-text renderings.

use std::fmt::Write as _;

use dosefind::simulator::Table1;
use dosefind::{CcdClass, CrmClass};

use crate::commands::{fmt_levels, fmt_list, ClassifyRecord, SimulationRecord};

pub fn classify_text(out: &mut String, r: &ClassifyRecord) {
    let v = &r.ccd;
    let _ = writeln!(out, "scenario {}: f = ({}), p = {}", r.id, fmt_list(&r.f), r.p);
    let _ = writeln!(out, "MTD: level {}", r.mtd);
    let detail = match v.class {
        CcdClass::Yes if v.boundary_case => "target outside the curve, converges to the end level".to_owned(),
        CcdClass::Yes => format!("level {} alone in the interval", r.mtd),
        CcdClass::No2plus => format!("levels in interval: {}", fmt_levels(&v.levels_in_interval)),
        CcdClass::No0 => {
            let pair = v.oscillation_pair.map(|(a, b)| format!("oscillates between {a} and {b}")).unwrap_or_default();
            if v.endpoint_only {
                format!("{pair}; level {} sits on an endpoint", fmt_levels(&v.levels_in_interval))
            } else {
                pair
            }
        }
    };
    let _ = writeln!(out, "CCD: {}   [{} - {}, {} + {}]: {detail}", v.class, r.p, r.dp1, r.p, r.dp2);
    let Some(crm) = &r.crm else {
        let _ = writeln!(out, "CRM: not assessed (no built-in skeleton for {} levels; pass --skeleton)", r.f.len());
        return;
    };
    let _ = writeln!(
        out,
        "CRM: {}   self-nominating: {}; misspecification {:.4}",
        crm.verdict.class,
        fmt_levels(&crm.verdict.self_nominators),
        crm.misspec_distance
    );
    let _ = writeln!(out, "level  f          skeleton   theta       nominee");
    for n in &crm.nominations {
        let _ = writeln!(
            out,
            "{:>5}  {:<9.4}  {:<9.4}  {:>+9.5}  {:>7}",
            n.level.get(),
            n.f,
            n.skeleton,
            n.theta,
            n.nominee.get()
        );
    }
}

pub fn simulation_text(out: &mut String, r: &SimulationRecord) {
    let _ = writeln!(out, "scenario {}: f = ({}), p = {}, MTD {}", r.id, fmt_list(&r.f), r.p, r.mtd);
    let _ = writeln!(
        out,
        "design {}, cohort {}, start {}: {} trials x {} subjects, seed {}",
        r.design.kind_name(),
        r.design.cohort(),
        r.design.start(),
        r.reps,
        r.n,
        r.seed
    );
    let _ = writeln!(out, "level  recommended  allocation");
    for (i, (rec, alloc)) in r.recommended.iter().zip(&r.allocation).enumerate() {
        let _ = writeln!(out, "{:>5}  {:>11.3}  {:>10.3}", i + 1, rec, alloc);
    }
    let _ = writeln!(out, "correct recommendation {:.3}", r.correct_recommendation);
    let _ = writeln!(out, "settled {:.3}, settled at MTD {:.3}", r.settled, r.settled_at_mtd);
    if let (Some(class), Some(share)) = (r.ccd_class, r.matches_prediction) {
        let _ = writeln!(out, "CCD class {class}: tail matches prediction in {share:.3}");
    }
}

/// Cross-tabulation in percent of all scenarios, one block per width.
pub fn table1_text(out: &mut String, t: &Table1, seed: u64) {
    let _ = writeln!(
        out,
        "m = {}: {} scenarios, p = {}, seed {}, skeleton ({})",
        t.m,
        t.scenarios(),
        t.p,
        seed,
        fmt_list(&t.skeleton)
    );
    let mut head = format!("{:<14}{:>7}", "", "");
    let mut cols = format!("{:<14}{:>7}", "CRM", "margin");
    for tab in &t.tabs {
        let width = if tab.dp1 == tab.dp2 { format!("±{}", tab.dp1) } else { format!("-{} +{}", tab.dp1, tab.dp2) };
        let _ = write!(head, "   {:<24}", format!("CCD width {width}"));
        cols.push_str("   ");
        for c in CcdClass::ALL {
            let _ = write!(cols, "{:>8}", c.to_string());
        }
    }
    let _ = writeln!(out, "{}", head.trim_end());
    let _ = writeln!(out, "{cols}");
    for crm in CrmClass::ALL {
        let mut line = format!("{:<14}{:>7.1}", crm.to_string(), t.crm_margin(crm));
        for tab in &t.tabs {
            line.push_str("   ");
            for ccd in CcdClass::ALL {
                let _ = write!(line, "{:>8.1}", tab.cell_percent(crm, ccd));
            }
        }
        let _ = writeln!(out, "{line}");
    }
    let mut line = format!("{:<14}{:>7}", "CCD margin", "");
    for tab in &t.tabs {
        line.push_str("   ");
        for ccd in CcdClass::ALL {
            let _ = write!(line, "{:>8.1}", tab.ccd_margin(ccd));
        }
    }
    let _ = writeln!(out, "{line}");
}
