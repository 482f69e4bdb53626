//! Linear dependence in the Krylov sequence `v, Av, A²v, …` and the bound on
//! the coefficients that express the first dependent power.

use crate::error::{Error, Result};
use crate::matcore::{operator_norm, ComplexMatrix, C64, ZERO};

/// Residual-to-norm ratio below which a new Krylov vector counts as dependent.
pub const KRYLOV_RANK_TOL: f64 = 1e-10;
/// Ratios within this factor of the threshold are flagged as borderline.
const BORDERLINE_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovDependence {
    /// Smallest `n` with `Aⁿv ∈ span{v, …, Aⁿ⁻¹v}`.
    pub n: usize,
    /// `Aⁿv = Σ_{i<n} λ_i Aⁱv`
    pub lambdas: Vec<C64>,
    pub l1_norm: f64,
    /// `n · (n+1)!/2 · max(‖A‖, ‖A‖ⁿ)` with the spectral norm.
    pub bound: f64,
    pub operator_norm: f64,
    /// Relative residual of the expansion.
    pub residual: f64,
    /// Orthogonalized residual ratio of `Aⁿv`.
    pub dependence_ratio: f64,
    /// Smallest such ratio among the accepted independent vectors.
    pub min_independent_ratio: f64,
    pub borderline: bool,
    pub within_bound: bool,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn krylov_dependence(a: &ComplexMatrix, v: &[C64]) -> Result<KrylovDependence> {
    let d = a.require_square("Krylov operator")?;
    if v.len() != d {
        return Err(Error::Dimension(format!(
            "vector of length {} for a {d}x{d} matrix",
            v.len()
        )));
    }
    if norm(v) == 0.0 || v.iter().any(|z| !z.is_finite()) {
        return Err(Error::Validation("Krylov start vector must be nonzero and finite".into()));
    }

    let mut basis: Vec<Vec<C64>> = Vec::new();
    // Column k holds the coordinates of Aᵏv in `basis`.
    let mut r_cols: Vec<Vec<C64>> = Vec::new();
    let mut powers: Vec<Vec<C64>> = Vec::new();
    let mut w = v.to_vec();
    let mut min_independent_ratio = f64::INFINITY;

    let (n, coords, dependence_ratio) = loop {
        let wn = norm(&w);
        let mut r = w.clone();
        let mut c = vec![ZERO; basis.len()];
        for _ in 0..2 {
            for (q, ck) in basis.iter().zip(c.iter_mut()) {
                let p = dot(q, &r);
                *ck += p;
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= p * qi;
                }
            }
        }
        let rn = norm(&r);
        let ratio = if wn == 0.0 { 0.0 } else { rn / wn };
        let k = powers.len();
        if ratio <= KRYLOV_RANK_TOL || k == d {
            break (k, c, ratio);
        }
        min_independent_ratio = min_independent_ratio.min(ratio);
        let mut col = c;
        col.push(C64::new(rn, 0.0));
        r_cols.push(col);
        basis.push(r.iter().map(|z| z / rn).collect());
        powers.push(w.clone());
        w = a.apply(&w);
    };

    // Back substitution on the triangular coordinates.
    let mut lambdas = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut s = coords[i];
        for (j, lj) in lambdas.iter().enumerate().skip(i + 1) {
            s -= r_cols[j][i] * lj;
        }
        lambdas[i] = s / r_cols[i][i];
    }

    let mut recon = vec![ZERO; d];
    for (lam, p) in lambdas.iter().zip(&powers) {
        for (x, y) in recon.iter_mut().zip(p) {
            *x += lam * y;
        }
    }
    let target_norm = norm(&w);
    let diff: Vec<C64> = recon.iter().zip(&w).map(|(x, y)| x - y).collect();
    let residual = if target_norm == 0.0 {
        norm(&diff)
    } else {
        norm(&diff) / target_norm
    };

    let op = operator_norm(a);
    let factorial: f64 = (1..=n + 1).map(|k| k as f64).product();
    let bound = n as f64 * factorial / 2.0 * op.max(op.powi(n as i32));
    let l1_norm: f64 = lambdas.iter().map(|z| z.norm()).sum();
    let near = |x: f64| {
        x > KRYLOV_RANK_TOL / BORDERLINE_FACTOR && x < KRYLOV_RANK_TOL * BORDERLINE_FACTOR
    };
    Ok(KrylovDependence {
        n,
        l1_norm,
        bound,
        operator_norm: op,
        residual,
        dependence_ratio,
        min_independent_ratio,
        borderline: near(dependence_ratio) || near(min_independent_ratio),
        within_bound: l1_norm <= bound * (1.0 + 1e-12),
        lambdas,
    })
}
