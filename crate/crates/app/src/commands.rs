//! Batch subcommands. Each returns its rendered output; `main` decides where
//! it goes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use dosefind::convergence::{CcdVerdict, CrmVerdict};
use dosefind::rational::from_decimal;
use dosefind::rng::{derive_seed, TAG_TRIAL};
use dosefind::scenario_gen::{default_skeleton, gen_ensemble, GenConfig, SeedInfo};
use dosefind::simulator::{estimate_limit_set, run_trial, table1_crosstab, CounterexampleReport, Table1};
use dosefind::{
    ccd_classify, crm_classify, crm_nominations, misspec_distance, mtd_index, CcdClass, DesignSpec, ExactScenario,
    Level, Scenario,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{DesignArgs, Format, ScenarioSource};
use crate::input::{self, NamedCurve};
use crate::report;

pub const TABLE1_WIDTHS: [(f64, f64); 2] = [(0.1, 0.1), (0.05, 0.05)];

fn jsonl<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn levels(xs: &[Level]) -> String {
    if xs.is_empty() {
        return "none".into();
    }
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Serialize)]
pub struct NominationRow {
    pub level: Level,
    pub f: f64,
    pub skeleton: f64,
    pub theta: f64,
    pub nominee: Level,
}

#[derive(Debug, Serialize)]
pub struct ClassifyRecord {
    pub id: String,
    pub f: Vec<f64>,
    pub p: f64,
    pub dp1: f64,
    pub dp2: f64,
    pub mtd: Level,
    pub ccd: CcdVerdict,
    /// Absent when no skeleton was given and none is built in for `m`.
    pub crm: Option<CrmReport>,
}

#[derive(Debug, Serialize)]
pub struct CrmReport {
    #[serde(flatten)]
    pub verdict: CrmVerdict,
    pub skeleton: Vec<f64>,
    pub nominations: Vec<NominationRow>,
    pub misspec_distance: f64,
}

pub fn classify_curve(
    curve: &NamedCurve,
    p: f64,
    dp1: f64,
    dp2: f64,
    skeleton: Option<&[f64]>,
) -> Result<ClassifyRecord> {
    let sc = input::scenario(curve, p)?;
    let exact = ExactScenario::new(curve.f.iter().map(|&x| from_decimal(x)).collect(), from_decimal(p))
        .map_err(|e| anyhow!("invalid scenario {}: {e}", curve.id))?;
    let ccd = ccd_classify(&exact, from_decimal(dp1), from_decimal(dp2)).map_err(|e| anyhow!("--dp1/--dp2: {e}"))?;
    let mtd = mtd_index(&sc);
    let skeleton = match skeleton {
        Some(given) => Some(input::skeleton_for(sc.m(), Some(given))?),
        None => default_skeleton(sc.m()),
    };
    let crm = skeleton.map(|skeleton| crm_report(&sc, mtd, skeleton)).transpose()?;
    Ok(ClassifyRecord { id: curve.id.clone(), f: curve.f.clone(), p, dp1, dp2, mtd, ccd, crm })
}

fn crm_report(sc: &Scenario, mtd: Level, skeleton: Vec<f64>) -> Result<CrmReport> {
    let table = crm_nominations(sc, &skeleton)?;
    let nominations = sc
        .levels()
        .map(|u| NominationRow {
            level: u,
            f: sc.rate(u),
            skeleton: skeleton[u.index()],
            theta: table.theta[u.index()],
            nominee: table.nominee_of(u),
        })
        .collect();
    Ok(CrmReport {
        verdict: crm_classify(&table, mtd),
        misspec_distance: misspec_distance(sc, &skeleton, mtd)?,
        skeleton,
        nominations,
    })
}

pub fn classify(
    source: &ScenarioSource,
    p: f64,
    dp1: f64,
    dp2: f64,
    skeleton: Option<&[f64]>,
    format: Format,
) -> Result<String> {
    let records = input::read_curves(source)?
        .iter()
        .map(|c| classify_curve(c, p, dp1, dp2, skeleton))
        .collect::<Result<Vec<_>>>()?;
    if format == Format::Records {
        return jsonl(&records);
    }
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        report::classify_text(&mut out, r);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct ScenarioRecord {
    pub id: u64,
    pub m: usize,
    pub p: f64,
    pub f: Vec<f64>,
    pub alpha_used: Vec<f64>,
    pub seed_info: SeedInfo,
}

pub fn gen_scenarios(m: usize, count: usize, p: f64, seed: u64, format: Format) -> Result<String> {
    let mut cfg = GenConfig::with_defaults(m, count, seed);
    cfg.target = p;
    let ens = gen_ensemble(&cfg)?;
    let records: Vec<ScenarioRecord> = ens
        .scenarios
        .iter()
        .map(|g| ScenarioRecord {
            id: g.id,
            m,
            p,
            f: g.scenario.rates().to_vec(),
            alpha_used: g.alpha_used.clone(),
            seed_info: g.seed_info.clone(),
        })
        .collect();
    if format == Format::Records {
        return jsonl(&records);
    }
    let mut out = format!(
        "# {count} scenarios, m = {m}, p = {p}, seed {seed}, acceptance rate {:.3}\n",
        ens.acceptance_rate()
    );
    for r in &records {
        let f: Vec<String> = r.f.iter().map(|x| format!("{x:.4}")).collect();
        writeln!(out, "{:>6}  {}", r.id, f.join(" "))?;
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct SimulationRecord {
    pub id: String,
    pub f: Vec<f64>,
    pub p: f64,
    pub design: DesignSpec,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub mtd: Level,
    /// Share of replications recommending each level.
    pub recommended: Vec<f64>,
    /// Mean share of subjects allocated to each level.
    pub allocation: Vec<f64>,
    pub correct_recommendation: f64,
    /// Tail window at a single level.
    pub settled: f64,
    pub settled_at_mtd: f64,
    /// Interval-design class of the curve, with the share of replications
    /// whose tail agrees with it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ccd_class: Option<CcdClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_prediction: Option<f64>,
}

struct RepSummary {
    recommended: Level,
    allocation: Vec<f64>,
    settled: bool,
    s1: Level,
    s2: Level,
}

fn matches(verdict: &CcdVerdict, r: &RepSummary) -> bool {
    match verdict.class {
        CcdClass::Yes => r.settled && r.s1 == verdict.mtd,
        CcdClass::No0 => verdict.oscillation_pair == Some((r.s1, r.s2)),
        CcdClass::No2plus => r.settled && verdict.levels_in_interval.contains(&r.s1),
    }
}

pub fn simulate_curve(
    index: u64,
    sc: &Scenario,
    spec: &DesignSpec,
    n: usize,
    reps: usize,
    tail: f64,
    seed: u64,
) -> Result<SimulationRecord> {
    if reps == 0 {
        return Err(anyhow!("invalid --reps: need at least one replication"));
    }
    if !(tail > 0.0 && tail <= 1.0) {
        return Err(anyhow!("invalid --tail: {tail} must lie in (0, 1]"));
    }
    let summaries = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let trace = run_trial(sc, spec, n, derive_seed(seed, &[TAG_TRIAL, index, rep]))?;
            let limit = estimate_limit_set(&trace, tail);
            let total = trace.len() as f64;
            Ok(RepSummary {
                recommended: trace.recommended,
                allocation: trace.final_state.n().iter().map(|&k| k as f64 / total).collect(),
                settled: limit.settled,
                s1: limit.s1,
                s2: limit.s2,
            })
        })
        .collect::<dosefind::Result<Vec<_>>>()?;
    let m = sc.m();
    let r = reps as f64;
    let mtd = mtd_index(sc);
    let mut recommended = vec![0.0; m];
    let mut allocation = vec![0.0; m];
    for s in &summaries {
        recommended[s.recommended.index()] += 1.0 / r;
        for (a, x) in allocation.iter_mut().zip(&s.allocation) {
            *a += x / r;
        }
    }
    let share = |pred: &dyn Fn(&RepSummary) -> bool| summaries.iter().filter(|s| pred(s)).count() as f64 / r;
    let verdict = match spec.kind() {
        dosefind::DesignKind::Interval { dp1, dp2, .. } => {
            let exact = ExactScenario::new(sc.rates().iter().map(|&x| from_decimal(x)).collect(), spec.target())?;
            Some(ccd_classify(&exact, *dp1, *dp2)?)
        }
        _ => None,
    };
    Ok(SimulationRecord {
        id: sc.label().unwrap_or_default().to_owned(),
        f: sc.rates().to_vec(),
        p: sc.target(),
        design: spec.clone(),
        n,
        reps,
        seed,
        mtd,
        correct_recommendation: share(&|s| s.recommended == mtd),
        settled: share(&|s| s.settled),
        settled_at_mtd: share(&|s| s.settled && s.s1 == mtd),
        matches_prediction: verdict.as_ref().map(|v| share(&|s| matches(v, s))),
        ccd_class: verdict.map(|v| v.class),
        recommended,
        allocation,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    source: &ScenarioSource,
    p: f64,
    design: &DesignArgs,
    n: usize,
    reps: usize,
    tail: f64,
    seed: u64,
    format: Format,
) -> Result<String> {
    if n == 0 {
        return Err(anyhow!("invalid --n: need at least one subject"));
    }
    let curves = input::read_curves(source)?;
    let mut records = Vec::with_capacity(curves.len());
    for (i, c) in curves.iter().enumerate() {
        let sc = input::scenario(c, p)?;
        let spec = input::design(design, p, sc.m())?;
        records.push(simulate_curve(i as u64, &sc, &spec, n, reps, tail, seed)?);
    }
    if format == Format::Records {
        return jsonl(&records);
    }
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        report::simulation_text(&mut out, r);
    }
    Ok(out)
}

/// Both table renderings for every requested grid size.
pub struct Table1Output {
    pub text: String,
    pub records: String,
}

#[derive(Debug, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Table1Record<'a> {
    Scenario {
        m: usize,
        id: u64,
        f: &'a [f64],
        alpha_used: &'a [f64],
        seed_info: &'a SeedInfo,
        #[serde(flatten)]
        classification: &'a dosefind::simulator::ScenarioClassification,
    },
    Crosstab {
        m: usize,
        p: f64,
        seed: u64,
        scenarios: usize,
        dp1: f64,
        dp2: f64,
        /// Rows: CRM classes; columns: interval-design classes.
        rows: Vec<String>,
        columns: Vec<String>,
        counts: [[usize; 3]; 5],
    },
}

pub fn table1_for(m: usize, count: usize, p: f64, seed: u64) -> Result<(Table1, dosefind::scenario_gen::Ensemble)> {
    let mut cfg = GenConfig::with_defaults(m, count, seed);
    cfg.target = p;
    let ens = gen_ensemble(&cfg)?;
    let skeleton = input::skeleton_for(m, None)?;
    let scenarios: Vec<Scenario> = ens.scenarios.iter().map(|g| g.scenario.clone()).collect();
    let table = table1_crosstab(&scenarios, &TABLE1_WIDTHS, &skeleton, p)?;
    Ok((table, ens))
}

pub fn table1(ms: &[usize], count: usize, p: f64, seed: u64) -> Result<Table1Output> {
    let mut text = String::new();
    let mut records = String::new();
    for (i, &m) in ms.iter().enumerate() {
        let (table, ens) = table1_for(m, count, p, seed)?;
        if i > 0 {
            text.push('\n');
        }
        report::table1_text(&mut text, &table, seed);
        for (g, row) in ens.scenarios.iter().zip(&table.rows) {
            let rec = Table1Record::Scenario {
                m,
                id: g.id,
                f: g.scenario.rates(),
                alpha_used: &g.alpha_used,
                seed_info: &g.seed_info,
                classification: row,
            };
            records.push_str(&serde_json::to_string(&rec)?);
            records.push('\n');
        }
        for tab in &table.tabs {
            let rec = Table1Record::Crosstab {
                m,
                p,
                seed,
                scenarios: table.scenarios(),
                dp1: tab.dp1,
                dp2: tab.dp2,
                rows: dosefind::CrmClass::ALL.iter().map(|c| c.to_string()).collect(),
                columns: CcdClass::ALL.iter().map(|c| c.to_string()).collect(),
                counts: tab.counts,
            };
            records.push_str(&serde_json::to_string(&rec)?);
            records.push('\n');
        }
    }
    Ok(Table1Output { text, records })
}

pub fn write_table1(dir: &Path, out: &Table1Output) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let text = dir.join("table1.txt");
    let records = dir.join("table1.jsonl");
    fs::write(&text, &out.text).with_context(|| format!("cannot write {}", text.display()))?;
    fs::write(&records, &out.records).with_context(|| format!("cannot write {}", records.display()))?;
    Ok(vec![text, records])
}

#[derive(Debug, Serialize)]
pub struct CounterexampleRecord {
    pub f: Vec<f64>,
    pub p: f64,
    pub cohort: usize,
    pub start: Level,
    pub n: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub report: CounterexampleReport,
    /// Frequency at least the canonical-path bound minus three standard errors.
    pub clears_bound: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn counterexample(
    f: &[f64],
    p: f64,
    cohort: usize,
    start: usize,
    n: usize,
    reps: usize,
    seed: u64,
    format: Format,
) -> Result<String> {
    let curve = NamedCurve { id: "inline".into(), f: f.to_vec() };
    let sc = input::scenario(&curve, p)?;
    let args = DesignArgs {
        design: crate::cli::DesignChoice::Point,
        dp1: 0.1,
        dp2: 0.1,
        monotonized: false,
        skeleton: None,
        no_skipping: false,
        cohort,
        start,
    };
    let spec = input::design(&args, p, sc.m())?;
    let report = dosefind::simulator::counterexample_point(&sc, &spec, n, reps, seed)?;
    let clears_bound = report.trap_frequency >= report.lower_bound - 3.0 * report.mc_standard_error;
    let rec = CounterexampleRecord { f: f.to_vec(), p, cohort, start: spec.start(), n, seed, report, clears_bound };
    if format == Format::Records {
        return jsonl(&[rec]);
    }
    let mut out = String::new();
    writeln!(out, "point design, f = ({}), p = {p}, cohort {cohort}, start {}", list(f), rec.start)?;
    writeln!(out, "trials: {reps} x {n} subjects, seed {seed}")?;
    writeln!(out, "MTD (trap level): {}", rec.report.trap_level)?;
    writeln!(
        out,
        "trapped: {} ({:.4} ± {:.4})",
        rec.report.trapped, rec.report.trap_frequency, rec.report.mc_standard_error
    )?;
    writeln!(out, "canonical-path lower bound: {:.4}", rec.report.lower_bound)?;
    writeln!(out, "clears bound (freq ≥ bound - 3 SE): {}", if clears_bound { "yes" } else { "no" })?;
    Ok(out)
}

pub(crate) fn fmt_levels(xs: &[Level]) -> String {
    levels(xs)
}

pub(crate) fn fmt_list(xs: &[f64]) -> String {
    list(xs)
}
