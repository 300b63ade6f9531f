//! Scenario files, inline curves and design flags.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use dosefind::rational::from_decimal;
use dosefind::scenario_gen::default_skeleton;
use dosefind::{DesignSpec, Level, Scenario};
use serde::Deserialize;

use crate::cli::{DesignArgs, DesignChoice, ScenarioSource};

/// A curve read from the command line or a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedCurve {
    pub id: String,
    pub f: Vec<f64>,
}

#[derive(Deserialize)]
struct CurveRecord {
    #[serde(default)]
    id: Option<serde_json::Value>,
    f: Vec<f64>,
}

pub fn read_curves(source: &ScenarioSource) -> Result<Vec<NamedCurve>> {
    match (&source.f, &source.scenario) {
        (Some(f), _) => Ok(vec![NamedCurve { id: "inline".into(), f: f.clone() }]),
        (None, Some(path)) => read_curve_file(path),
        (None, None) => bail!("pass --f or --scenario"),
    }
}

pub fn read_curve_file(path: &Path) -> Result<Vec<NamedCurve>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut curves = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: CurveRecord = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: malformed scenario record", path.display(), i + 1))?;
        let id = match rec.id {
            Some(serde_json::Value::String(s)) => s,
            Some(other) => other.to_string(),
            None => (curves.len()).to_string(),
        };
        curves.push(NamedCurve { id, f: rec.f });
    }
    if curves.is_empty() {
        bail!("{}: no scenario records", path.display());
    }
    Ok(curves)
}

/// Validate a curve against the target, naming the source in errors.
pub fn scenario(curve: &NamedCurve, p: f64) -> Result<Scenario> {
    let field = if curve.id == "inline" { "--f".to_owned() } else { format!("scenario {}", curve.id) };
    check_finite(&field, &curve.f)?;
    Scenario::new(curve.f.clone(), p)
        .map(|s| s.with_label(curve.id.clone()))
        .map_err(|e| anyhow!("invalid {field}: {e}"))
}

pub fn check_finite(field: &str, xs: &[f64]) -> Result<()> {
    if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
        bail!("invalid {field}: entry {} is not a finite number", i + 1);
    }
    Ok(())
}

pub fn skeleton_for(m: usize, given: Option<&[f64]>) -> Result<Vec<f64>> {
    match given {
        Some(s) => {
            check_finite("--skeleton", s)?;
            if s.len() != m {
                bail!("invalid --skeleton: {} entries for {m} dose levels", s.len());
            }
            dosefind::designs::check_skeleton(s).map_err(|e| anyhow!("invalid --skeleton: {e}"))?;
            Ok(s.to_vec())
        }
        None => default_skeleton(m).ok_or_else(|| anyhow!("no built-in skeleton for {m} levels; pass --skeleton")),
    }
}

pub fn design(args: &DesignArgs, p: f64, m: usize) -> Result<DesignSpec> {
    let target = from_decimal(p);
    let spec = match args.design {
        DesignChoice::Interval => DesignSpec::interval(target, from_decimal(args.dp1), from_decimal(args.dp2))
            .map(|s| s.with_monotonized_interval(args.monotonized)),
        DesignChoice::Point => DesignSpec::point(target),
        DesignChoice::Crm => {
            let skeleton = skeleton_for(m, args.skeleton.as_deref())?;
            DesignSpec::crm(target, skeleton).map(|s| s.with_no_skipping(args.no_skipping))
        }
    }
    .map_err(|e| anyhow!("invalid design flags: {e}"))?;
    let spec = spec.with_cohort(args.cohort).map_err(|e| anyhow!("invalid --cohort: {e}"))?;
    let spec = spec.with_start(Level::new(args.start.max(1))).map_err(|e| anyhow!("invalid --start: {e}"))?;
    if args.start == 0 || args.start > m {
        bail!("invalid --start: level {} is outside 1..={m}", args.start);
    }
    Ok(spec)
}
