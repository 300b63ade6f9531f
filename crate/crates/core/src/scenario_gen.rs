//! Random dose-toxicity curves built from bounded Dirichlet increments.
//!
//! A curve on `m` levels is cut from a Dirichlet vector of length `m + 1`:
//! the mass below level 1 (which is `f[1]`), the `m - 1` gaps between
//! adjacent levels, and the mass above level `m` (`1 - f[m]`). Draws whose
//! gaps or edge masses fall outside the configured bounds are rejected.
//!
//! The default pool, bounds and the ten-level skeleton are stated defaults of
//! this crate; see [`GenConfig::with_defaults`].

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ToxScenario;
use crate::rng::{derive_seed, rng_from_seed, TAG_SCENARIO};

pub const MAX_ATTEMPTS: usize = 10_000;

/// Power-model skeleton for five levels.
pub const SKELETON_5: [f64; 5] = [0.05, 0.1, 0.2, 0.4, 0.8];
/// Power-model skeleton for ten levels.
pub const SKELETON_10: [f64; 10] = [0.02, 0.04, 0.07, 0.12, 0.20, 0.30, 0.42, 0.55, 0.70, 0.85];

pub fn default_skeleton(m: usize) -> Option<Vec<f64>> {
    match m {
        5 => Some(SKELETON_5.to_vec()),
        10 => Some(SKELETON_10.to_vec()),
        _ => None,
    }
}

/// The 27 vectors `c * (a0, 1, ..., 1, am)` with `c ∈ {1, 2, 5}`,
/// `a0 ∈ {0.5, 1, 2}` and `am ∈ {2, 4, 8}`.
///
/// The heavier upper edge keeps the top dose well short of certain toxicity,
/// so most curves cross the usual targets inside the grid.
pub fn default_alpha_pool(m: usize) -> Vec<Vec<f64>> {
    let mut pool = Vec::with_capacity(27);
    for c in [1.0, 2.0, 5.0] {
        for a0 in [0.5, 1.0, 2.0] {
            for am in [2.0, 4.0, 8.0] {
                let mut alpha = vec![c; m + 1];
                alpha[0] = c * a0;
                alpha[m] = c * am;
                pool.push(alpha);
            }
        }
    }
    pool
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub m: usize,
    pub alpha_pool: Vec<Vec<f64>>,
    /// Bounds on the gaps between adjacent levels.
    pub inc_lo: f64,
    pub inc_hi: f64,
    /// Bounds on `f[1]` and on `1 - f[m]`.
    pub edge_lo: f64,
    pub edge_hi: f64,
    pub count: usize,
    pub seed: u64,
    /// Target rate attached to every emitted scenario.
    pub target: f64,
}

impl GenConfig {
    /// Default pool, gap bounds `[0.01, 0.40]`, edge bounds `[0.005, 0.95]`,
    /// target 0.3.
    pub fn with_defaults(m: usize, count: usize, seed: u64) -> Self {
        GenConfig {
            m,
            alpha_pool: default_alpha_pool(m),
            inc_lo: 0.01,
            inc_hi: 0.40,
            edge_lo: 0.005,
            edge_hi: 0.95,
            count,
            seed,
            target: 0.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m < 2 {
            return bad(format!("m = {} must be at least 2", self.m));
        }
        if self.alpha_pool.is_empty() {
            return bad("alpha pool is empty".into());
        }
        for (i, alpha) in self.alpha_pool.iter().enumerate() {
            if alpha.len() != self.m + 1 {
                return bad(format!("alpha vector {i} has length {}, expected {}", alpha.len(), self.m + 1));
            }
            if alpha.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
                return bad(format!("alpha vector {i} has a non-positive entry"));
            }
        }
        if !(0.0 < self.inc_lo && self.inc_lo < self.inc_hi && self.inc_hi < 1.0) {
            return bad(format!("need 0 < inc_lo < inc_hi < 1, got [{}, {}]", self.inc_lo, self.inc_hi));
        }
        if !(0.0 < self.edge_lo && self.edge_lo < self.edge_hi && self.edge_hi < 1.0) {
            return bad(format!("need 0 < edge_lo < edge_hi < 1, got [{}, {}]", self.edge_lo, self.edge_hi));
        }
        let gaps = (self.m - 1) as f64;
        if gaps * self.inc_lo + 2.0 * self.edge_lo >= 1.0 || gaps * self.inc_hi + 2.0 * self.edge_hi <= 1.0 {
            return bad("bounds cannot be met by any curve".into());
        }
        if !(self.target > 0.0 && self.target < 1.0) {
            return bad(format!("target {} must lie in (0, 1)", self.target));
        }
        Ok(())
    }

    fn accepts(&self, w: &[f64]) -> bool {
        let m = self.m;
        let edge_ok = |x: f64| self.edge_lo <= x && x <= self.edge_hi;
        edge_ok(w[0]) && edge_ok(w[m]) && w[1..m].iter().all(|&x| self.inc_lo <= x && x <= self.inc_hi)
    }
}

/// Where a generated scenario came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedInfo {
    pub master_seed: u64,
    pub index: u64,
    pub stream_seed: u64,
    pub alpha_index: usize,
    pub attempts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedScenario {
    pub id: u64,
    pub scenario: ToxScenario<f64>,
    pub alpha_used: Vec<f64>,
    pub seed_info: SeedInfo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub config: GenConfig,
    pub scenarios: Vec<GeneratedScenario>,
}

impl Ensemble {
    pub fn total_attempts(&self) -> usize {
        self.scenarios.iter().map(|s| s.seed_info.attempts).sum()
    }

    /// Accepted draws over total draws.
    pub fn acceptance_rate(&self) -> f64 {
        if self.scenarios.is_empty() {
            return f64::NAN;
        }
        self.scenarios.len() as f64 / self.total_attempts() as f64
    }
}

fn dirichlet<R: Rng + ?Sized>(gammas: &[Gamma<f64>], rng: &mut R, out: &mut [f64]) {
    let mut sum = 0.0;
    for (x, g) in out.iter_mut().zip(gammas) {
        *x = g.sample(rng);
        sum += *x;
    }
    for x in out.iter_mut() {
        *x /= sum;
    }
}

/// Draw one curve: pick an alpha vector uniformly, then rejection-sample
/// Dirichlet increments under it. Returns the curve, the alpha index and the
/// number of draws used.
pub fn draw_scenario<R: Rng + ?Sized>(config: &GenConfig, rng: &mut R) -> Result<(ToxScenario<f64>, usize, usize)> {
    config.validate()?;
    let alpha_index = rng.random_range(0..config.alpha_pool.len());
    let gammas: Vec<Gamma<f64>> = config.alpha_pool[alpha_index]
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("validated shape"))
        .collect();
    let mut w = vec![0.0; config.m + 1];
    for attempt in 1..=MAX_ATTEMPTS {
        dirichlet(&gammas, rng, &mut w);
        if !config.accepts(&w) {
            continue;
        }
        let f: Vec<f64> = w[..config.m]
            .iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        // Float cumulative sums can in principle break the invariants; treat
        // that as a rejection rather than an error.
        if let Ok(s) = ToxScenario::new(f, config.target) {
            return Ok((s, alpha_index, attempt));
        }
    }
    Err(Error::RejectionCapExceeded(MAX_ATTEMPTS))
}

/// Scenario `i` of the ensemble `config` describes.
pub fn generate_one(config: &GenConfig, index: u64) -> Result<GeneratedScenario> {
    let stream_seed = derive_seed(config.seed, &[TAG_SCENARIO, index]);
    let mut rng = rng_from_seed(stream_seed);
    let (scenario, alpha_index, attempts) = draw_scenario(config, &mut rng)?;
    Ok(GeneratedScenario {
        id: index,
        scenario: scenario.with_label(format!("gen-m{}-{index}", config.m)),
        alpha_used: config.alpha_pool[alpha_index].clone(),
        seed_info: SeedInfo { master_seed: config.seed, index, stream_seed, alpha_index, attempts },
    })
}

/// `config.count` scenarios, generated in parallel on independent streams.
pub fn gen_ensemble(config: &GenConfig) -> Result<Ensemble> {
    config.validate()?;
    let scenarios = (0..config.count as u64)
        .into_par_iter()
        .map(|i| generate_one(config, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble { config: config.clone(), scenarios })
}
