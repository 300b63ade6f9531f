//! Command-line front end and trial-session service for `dosefind`.

pub mod cli;
pub mod commands;
pub mod input;
pub mod report;
pub mod service;

use std::io::Write;
use std::sync::Arc;

use anyhow::{Context, Result};

use cli::{Cli, Command, Format};

/// Run one parsed invocation.
pub fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if let Some(workers) = g.workers {
        anyhow::ensure!(workers > 0, "invalid --workers: need at least one thread");
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("cannot configure the worker pool")?;
    }
    let output = match &cli.command {
        Command::Classify { source, p, dp1, dp2, skeleton } => {
            commands::classify(source, *p, *dp1, *dp2, skeleton.as_deref(), g.format)?
        }
        Command::GenScenarios { m, count, p } => commands::gen_scenarios(*m, *count, *p, g.seed, g.format)?,
        Command::Simulate { source, p, design, n, reps, tail } => {
            commands::simulate(source, *p, design, *n, *reps, *tail, g.seed, g.format)?
        }
        Command::Table1 { m, count, p } => {
            let out = commands::table1(m, *count, *p, g.seed)?;
            match &g.out {
                Some(dir) => {
                    let paths = commands::write_table1(dir, &out)?;
                    for p in paths {
                        println!("wrote {}", p.display());
                    }
                    return Ok(());
                }
                None if g.format == Format::Records => out.records,
                None => out.text,
            }
        }
        Command::Counterexample { f, p, cohort, start, n, reps } => {
            commands::counterexample(f, *p, *cohort, *start, *n, *reps, g.seed, g.format)?
        }
        Command::Serve { listen, log } => {
            let store = Arc::new(service::SessionStore::open(log, g.seed)?);
            let runtime = tokio::runtime::Runtime::new().context("cannot start the async runtime")?;
            return runtime.block_on(service::serve(*listen, store));
        }
    };
    match &g.out {
        Some(path) => {
            std::fs::write(path, output).with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output.as_bytes()).context("cannot write to stdout")?;
        }
    }
    Ok(())
}
