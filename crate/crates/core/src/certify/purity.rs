//! Purity preservation along a trajectory, and the distance sandwich
//! between overlap, trace distance and fidelity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{build_generator, channel_from_generator, Lindbladian, Superoperator};
use crate::matcore::{fidelity, mixedness, overlap, trace_distance, DensityMatrix};

pub const DEFAULT_PURITY_STEPS: usize = 64;
/// Rounding slack on eigenvalue and distance comparisons.
const SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma4Report {
    pub holds: bool,
    /// Smallest top eigenvalue of `e^{𝓛t₂}(ψ_{t₁})` over sampled pairs.
    pub min_eigenvalue: f64,
    pub worst_t1: f64,
    pub worst_t2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurityReport {
    pub holds: bool,
    pub min_eigenvalue: f64,
    /// First grid time where the top eigenvalue drops below `1 − ε`.
    pub violated_at: Option<f64>,
    pub lemma4: Option<Lemma4Report>,
}

/// Samples `ρ(t) = e^{𝓛t}(ψ)` at `steps` equally spaced times in `[0, t_f]`
/// and requires a top eigenvalue of at least `1 − ε` throughout. When that
/// holds, re-evolves the top eigenvector from each `t₁` for every `t₂` with
/// `t₁ + t₂ ≤ t_f` and requires at least `1 − 2ε`.
pub fn purity_preservation_check(
    l: &Lindbladian,
    psi: &DensityMatrix,
    t_f: f64,
    epsilon: f64,
    steps: usize,
) -> Result<PurityReport> {
    if steps < 2 {
        return Err(Error::Domain(format!("need at least 2 grid points, got {steps}")));
    }
    if !(t_f.is_finite() && t_f > 0.0) {
        return Err(Error::Domain(format!("t_f must be positive, got {t_f}")));
    }
    if psi.dim() != l.dim() {
        return Err(Error::Dimension(format!(
            "state of dimension {} for a generator of dimension {}",
            psi.dim(),
            l.dim()
        )));
    }
    let generator = build_generator(l);
    let times: Vec<f64> = (0..steps)
        .map(|k| t_f * k as f64 / (steps - 1) as f64)
        .collect();
    let channels: Vec<Superoperator> = times
        .iter()
        .map(|&t| channel_from_generator(&generator, t))
        .collect::<Result<_>>()?;
    let states: Vec<DensityMatrix> = channels
        .iter()
        .map(|c| c.apply_state(psi))
        .collect::<Result<_>>()?;

    let threshold = 1.0 - epsilon - SLACK;
    let tops: Vec<f64> = states.iter().map(DensityMatrix::max_eigenvalue).collect();
    let min_eigenvalue = tops.iter().copied().fold(f64::INFINITY, f64::min);
    let violated_at = tops
        .iter()
        .position(|&v| v < threshold)
        .map(|k| times[k]);
    let holds = violated_at.is_none();

    let lemma4 = if holds {
        let mut worst = (f64::INFINITY, 0.0, 0.0);
        for (k1, state) in states.iter().enumerate() {
            let top = state.top_pure_state();
            for k2 in 0..steps - k1 {
                let v = channels[k2].apply_state(&top)?.max_eigenvalue();
                if v < worst.0 {
                    worst = (v, times[k1], times[k2]);
                }
            }
        }
        Some(Lemma4Report {
            holds: worst.0 >= 1.0 - 2.0 * epsilon - SLACK,
            min_eigenvalue: worst.0,
            worst_t1: worst.1,
            worst_t2: worst.2,
        })
    } else {
        None
    };
    Ok(PurityReport {
        holds,
        min_eigenvalue,
        violated_at,
        lemma4,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eq20Report {
    /// `1 − Tr(ρσ) − M(ρ)M(σ)`
    pub lower: f64,
    pub distance: f64,
    /// `√(1 − F(ρ, σ))`
    pub upper: f64,
    pub holds: bool,
}

/// `1 − Tr(ρσ) − M(ρ)M(σ) ≤ D(ρ, σ) ≤ √(1 − F(ρ, σ))`
pub fn eq20_bounds_check(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Eq20Report> {
    let distance = trace_distance(rho, sigma)?;
    let lower = 1.0 - overlap(rho, sigma)? - mixedness(rho) * mixedness(sigma);
    let upper = (1.0 - fidelity(rho, sigma)?).max(0.0).sqrt();
    Ok(Eq20Report {
        lower,
        distance,
        upper,
        holds: lower <= distance + SLACK && distance <= upper + SLACK,
    })
}
