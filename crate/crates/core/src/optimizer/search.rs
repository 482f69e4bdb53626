//! Seeded multistart search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{nelder_mead, ActionEvaluator, NelderMeadOptions, Parameterization};
use crate::error::{Error, Result};
use crate::stochastic::StochasticMatrix;

pub const DEFAULT_DELTA: f64 = 1e-4;
pub const DEFAULT_RESTARTS: usize = 64;

const TWO_PI: f64 = std::f64::consts::TAU;
const GAMMA_RANGE: (f64, f64) = (1e-3, 1e3);
const TIME_RANGE: (f64, f64) = (1e-3, 1e2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchVerdict {
    EmbeddableAtDelta,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub best_objective: f64,
    pub best_params: Vec<f64>,
    pub verdict: SearchVerdict,
    /// Restarts whose results entered the minimum.
    pub restarts_used: usize,
    pub seed: u64,
    pub parameterization: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub delta: f64,
    pub seed: u64,
    /// Stop after the first restart that reaches `delta`.
    pub stop_at_delta: bool,
    /// Additional Nelder–Mead runs restarted from the best point so far.
    pub polish_rounds: usize,
    pub nelder_mead: NelderMeadOptions,
}

impl SearchOptions {
    pub fn new(restarts: usize, delta: f64, seed: u64) -> Self {
        Self {
            restarts,
            delta,
            seed,
            ..Self::default()
        }
    }
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            delta: DEFAULT_DELTA,
            seed: 0,
            stop_at_delta: true,
            polish_rounds: 2,
            nelder_mead: NelderMeadOptions {
                initial_step: 0.5,
                ..NelderMeadOptions::default()
            },
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo.ln()..hi.ln())
}

/// Random start for restart `index`; each restart owns an independent
/// stream of the seeded generator.
pub fn initial_point(p: Parameterization, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let normal = |rng: &mut ChaCha8Rng| rng.sample::<f64, _>(StandardNormal);
    let mut x = Vec::with_capacity(p.param_count());
    match p {
        Parameterization::GeneralQubit => {
            x.push(rng.gen_range(0.0..TWO_PI));
            for _ in 0..32 {
                x.push(normal(&mut rng));
            }
        }
        Parameterization::ReducedQubit => {
            x.push(rng.gen_range(0.0..TWO_PI));
            x.push(rng.gen_range(0.0..TWO_PI));
            x.push(log_uniform(&mut rng, GAMMA_RANGE));
        }
        Parameterization::GeneralD(d) => {
            for _ in 0..d * d + 2 * d.pow(4) {
                x.push(normal(&mut rng));
            }
        }
    }
    x.push(log_uniform(&mut rng, TIME_RANGE));
    x
}

struct RestartOutcome {
    objective: f64,
    params: Vec<f64>,
}

fn run_restart(
    target: &StochasticMatrix,
    p: Parameterization,
    opts: &SearchOptions,
    index: usize,
) -> RestartOutcome {
    let mut evaluator = ActionEvaluator::new(p);
    let mut f = |x: &[f64]| evaluator.objective(target, x).unwrap_or(f64::INFINITY);
    let mut nm = opts.nelder_mead.clone();
    if opts.stop_at_delta {
        nm.target = Some(opts.delta);
    }
    let x0 = initial_point(p, opts.seed, index);
    let mut best = match nelder_mead(&mut f, &x0, &nm) {
        Ok(r) => RestartOutcome {
            objective: r.f,
            params: r.x,
        },
        Err(_) => {
            return RestartOutcome {
                objective: f64::INFINITY,
                params: x0,
            }
        }
    };
    for _ in 0..opts.polish_rounds {
        if opts.stop_at_delta && best.objective <= opts.delta {
            break;
        }
        match nelder_mead(&mut f, &best.params, &nm) {
            Ok(r) if r.f < best.objective => {
                best = RestartOutcome {
                    objective: r.f,
                    params: r.x,
                }
            }
            _ => break,
        }
    }
    best
}

/// Multistart minimization of the classical-action mismatch. The result
/// depends only on the inputs: restarts run in parallel batches, and with
/// `stop_at_delta` the minimum is taken over restarts up to and including
/// the first one that reaches `delta`.
pub fn embed_search(
    target: &StochasticMatrix,
    p: Parameterization,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    if opts.restarts == 0 {
        return Err(Error::Validation("at least one restart is required".into()));
    }
    if opts.delta.is_nan() || opts.delta <= 0.0 {
        return Err(Error::Domain(format!("delta must be positive, got {}", opts.delta)));
    }
    if target.dim() != p.dim() {
        return Err(Error::Dimension(format!(
            "target of dimension {} for {}",
            target.dim(),
            p.name()
        )));
    }
    let batch = rayon::current_num_threads().max(1);
    let mut outcomes: Vec<RestartOutcome> = Vec::new();
    let mut start = 0;
    while start < opts.restarts {
        let end = (start + batch).min(opts.restarts);
        let mut chunk: Vec<RestartOutcome> = (start..end)
            .into_par_iter()
            .map(|i| run_restart(target, p, opts, i))
            .collect();
        if opts.stop_at_delta {
            if let Some(k) = chunk.iter().position(|o| o.objective <= opts.delta) {
                chunk.truncate(k + 1);
                outcomes.extend(chunk);
                break;
            }
        }
        outcomes.extend(chunk);
        start = end;
    }
    let restarts_used = outcomes.len();
    // First index wins ties.
    let best = outcomes
        .into_iter()
        .reduce(|a, b| if b.objective < a.objective { b } else { a })
        .expect("at least one restart");
    Ok(SearchResult {
        verdict: if best.objective <= opts.delta {
            SearchVerdict::EmbeddableAtDelta
        } else {
            SearchVerdict::Inconclusive
        },
        best_objective: best.objective,
        best_params: best.params,
        restarts_used,
        seed: opts.seed,
        parameterization: p.name(),
    })
}
