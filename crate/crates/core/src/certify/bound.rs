//! Decay bound for the overlap of two evolved, initially distinguishable
//! states, with the exact constant `H(d) = (d⁴+1)!/2 · d^{d⁴+4}`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{build_generator, channel_from_generator, Lindbladian};
use crate::matcore::{hs_inner, trace_distance, DensityMatrix};

/// Largest `d` for which `H(d)` is materialized.
pub const MAX_EXACT_DIM: usize = 6;
/// Overlaps below this are treated as zero.
const OVERLAP_FLOOR: f64 = 1e-12;

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_EXACT_DIM {
        return Err(Error::Resource(format!(
            "H(d) is materialized for 1 ≤ d ≤ {MAX_EXACT_DIM}, got {d}"
        )));
    }
    Ok(())
}

/// Exact `H(d)`.
pub fn h_of_d(d: usize) -> Result<BigUint> {
    check_dim(d)?;
    let n = d.pow(4);
    let mut fact = BigUint::one();
    for k in 2..=(n + 1) {
        fact *= k;
    }
    Ok(fact / 2u32 * BigUint::from(d).pow((n + 4) as u32))
}

/// Display form `(d⁴+1)!/2 · d^(d⁴+4)` with the numbers filled in.
pub fn h_of_d_factored(d: usize) -> String {
    let n = d.pow(4);
    format!("{}!/2 · {d}^{}", n + 1, n + 4)
}

/// `ln H(d)` from the factored form; valid for any `d ≥ 1`.
pub fn ln_h_of_d(d: usize) -> f64 {
    let n = d.pow(4);
    let ln_fact: f64 = (2..=(n + 1)).map(|k| (k as f64).ln()).sum();
    ln_fact - 2f64.ln() + (n + 4) as f64 * (d as f64).ln()
}

/// Natural logarithm of a big integer; `−∞` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64_digits().first().copied().unwrap_or(0);
    (top as f64).ln() + shift as f64 * 2f64.ln()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop2Point {
    pub t: f64,
    /// `Tr[ρ₁(t_f+t) ρ₂(t_f+t)]`
    pub overlap: f64,
    /// `⌈(d⁴−1) t / t_f⌉`
    pub exponent: u64,
    /// `ln` of the right-hand side; `None` when it is zero.
    pub ln_bound: Option<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop2Report {
    pub hypothesis_met: bool,
    /// Trace distance of the two states at `t_f`.
    pub initial_distance: f64,
    pub epsilon: f64,
    pub ln_h: f64,
    pub points: Vec<Prop2Point>,
    pub skip_reason: Option<String>,
}

impl Prop2Report {
    pub fn violations(&self) -> usize {
        self.points.iter().filter(|p| !p.holds).count()
    }
}

/// If the evolved states are `(1−ε)`-distinguishable at `t_f`, checks
/// `Tr[ρ₁(t_f+t) ρ₂(t_f+t)] ≤ H(d)^{⌈(d⁴−1)t/t_f⌉} · ε(2−ε)` at every `t`.
pub fn prop2_check(
    l: &Lindbladian,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    t_f: f64,
    epsilon: f64,
    t_grid: &[f64],
) -> Result<Prop2Report> {
    let d = l.dim();
    if rho1.dim() != d || rho2.dim() != d {
        return Err(Error::Dimension(format!(
            "states must have dimension {d}, got {} and {}",
            rho1.dim(),
            rho2.dim()
        )));
    }
    if !(t_f.is_finite() && t_f > 0.0) {
        return Err(Error::Domain(format!("t_f must be positive, got {t_f}")));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Domain(format!("epsilon must lie in [0, 1], got {epsilon}")));
    }
    if let Some(bad) = t_grid.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::Domain(format!("grid times must be ≥ 0, got {bad}")));
    }
    let ln_h = match h_of_d(d) {
        Ok(h) => ln_biguint(&h),
        Err(_) => ln_h_of_d(d),
    };
    let generator = build_generator(l);
    let evolve = |t: f64| -> Result<(DensityMatrix, DensityMatrix)> {
        let ch = channel_from_generator(&generator, t)?;
        Ok((ch.apply_state(rho1)?, ch.apply_state(rho2)?))
    };
    let (a, b) = evolve(t_f)?;
    let initial_distance = trace_distance(&a, &b)?;
    if initial_distance < 1.0 - epsilon {
        return Ok(Prop2Report {
            hypothesis_met: false,
            initial_distance,
            epsilon,
            ln_h,
            points: Vec::new(),
            skip_reason: Some(format!(
                "hypothesis unmet: D = {initial_distance:.6} < 1 − ε = {:.6}",
                1.0 - epsilon
            )),
        });
    }
    let base = epsilon * (2.0 - epsilon);
    let dim4 = (d.pow(4) - 1) as f64;
    let points = t_grid
        .iter()
        .map(|&t| {
            let (x, y) = evolve(t_f + t)?;
            let overlap = hs_inner(x.matrix(), y.matrix());
            let exponent = (dim4 * t / t_f).ceil() as u64;
            let ln_bound = (base > 0.0).then(|| exponent as f64 * ln_h + base.ln());
            let excess = overlap - OVERLAP_FLOOR;
            let holds = excess <= 0.0 || ln_bound.is_some_and(|lb| excess.ln() <= lb);
            Ok(Prop2Point {
                t,
                overlap,
                exponent,
                ln_bound,
                holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Prop2Report {
        hypothesis_met: true,
        initial_distance,
        epsilon,
        ln_h,
        points,
        skip_reason: None,
    })
}
