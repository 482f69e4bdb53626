//! Analytic certificates for non-embeddability and numeric checks of the
//! inequalities behind them.

mod bound;
mod krylov;
mod purity;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stochastic::StochasticMatrix;

pub use bound::{h_of_d, h_of_d_factored, ln_biguint, ln_h_of_d, prop2_check, Prop2Point, Prop2Report};
pub use krylov::{krylov_dependence, KrylovDependence, KRYLOV_RANK_TOL};
pub use purity::{
    eq20_bounds_check, purity_preservation_check, Eq20Report, Lemma4Report, PurityReport,
    DEFAULT_PURITY_STEPS,
};

/// Largest diagonal entry for which the analytic region applies.
pub const SMALL_ENTRY_LIMIT: f64 = 1e-6;

/// Evaluates the pair `(f(a), g(a))` bounding the excluded qubit region.
/// Fractional powers of zero are zero.
pub fn f_g_eval(a: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("argument must lie in [0, 1], got {a}")));
    }
    let root = a.sqrt();
    let inner = 8.0 * root + a.powf(0.45);
    let denom = 1.0 - inner;
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "a = {a} is too large: 1 − (8√a + a^0.45) = {denom} ≤ 0"
        )));
    }
    let f = 2.0 * 2f64.sqrt() * a.powf(0.25)
        + (a * (2.0 - a)).sqrt()
        + a.powf(0.9)
        + 0.01 * (4.0 * root + a.powf(0.45)) / denom
        + 2.0 * inner.sqrt();
    let g = (2.0 - a) * (2.0 * a + a.powf(0.1));
    Ok((f, g))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Verdict {
    pub a: f64,
    pub b: f64,
    /// The reported values come from the branch with `a` and `b` exchanged.
    pub swapped: bool,
    pub f_a: Option<f64>,
    pub g_a: Option<f64>,
    #[serde(rename = "in_Q2_complement")]
    pub in_q2_complement: bool,
}

#[derive(Debug, Clone, Copy)]
struct Branch {
    small: f64,
    other: f64,
    f: f64,
    g: f64,
    excluded: bool,
}

fn branch(small: f64, other: f64) -> Option<Branch> {
    if small > SMALL_ENTRY_LIMIT {
        return None;
    }
    let (f, g) = f_g_eval(small).ok()?;
    let excluded = f * (2.0 - f) < other && other < 1.0 - g;
    Some(Branch {
        small,
        other,
        f,
        g,
        excluded,
    })
}

/// Tests both the `(a, b)` and the `(b, a)` branch with strict inequalities,
/// where `a = T_11` and `b = T_22`.
pub fn theorem1_test(t: &StochasticMatrix) -> Result<Theorem1Verdict> {
    if t.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            got: t.dim(),
            expected: "2".into(),
        });
    }
    let (a, b) = (t.get(0, 0), t.get(1, 1));
    let direct = branch(a, b);
    let swapped = branch(b, a);
    let (chosen, is_swapped) = match (direct, swapped) {
        (Some(d), _) if d.excluded => (Some(d), false),
        (_, Some(s)) if s.excluded => (Some(s), true),
        (Some(d), _) => (Some(d), false),
        (None, Some(s)) => (Some(s), true),
        (None, None) => (None, false),
    };
    let (a_rep, b_rep) = match chosen {
        Some(br) => (br.small, br.other),
        None => (a, b),
    };
    Ok(Theorem1Verdict {
        a: a_rep,
        b: b_rep,
        swapped: is_swapped,
        f_a: chosen.map(|c| c.f),
        g_a: chosen.map(|c| c.g),
        in_q2_complement: chosen.is_some_and(|c| c.excluded),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Term-by-term evaluation through `exp`/`ln`, independent of `powf`.
    fn oracle(a: f64) -> (f64, f64) {
        let p = |x: f64| if a == 0.0 { 0.0 } else { (x * a.ln()).exp() };
        let s = 8.0 * p(0.5) + p(0.45);
        let f = 8f64.sqrt() * p(0.25)
            + (2.0 * a - a * a).sqrt()
            + p(0.9)
            + (0.04 * p(0.5) + 0.01 * p(0.45)) / (1.0 - s)
            + 2.0 * s.sqrt();
        let g = 4.0 * a + 2.0 * p(0.1) - 2.0 * a * a - a * p(0.1);
        (f, g)
    }

    #[test]
    fn vanish_at_zero() {
        assert_eq!(f_g_eval(0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn reference_values() {
        let (f, g) = f_g_eval(1e-7).unwrap();
        assert!((f - 0.1646).abs() < 1e-3 && (g - 0.3990).abs() < 1e-3);
        let (_, g8) = f_g_eval(1e-8).unwrap();
        assert!((g8 - 0.3170).abs() < 1e-3);
        for a in [1e-12, 1e-9, 3e-7, 1e-6, 1e-4] {
            let (f, g) = f_g_eval(a).unwrap();
            let (fo, go) = oracle(a);
            assert!((f - fo).abs() < 1e-12 && (g - go).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_on_small_range() {
        let mut prev = (0.0, 0.0);
        for k in 0..=60 {
            let a = 10f64.powf(-18.0 + 12.0 * k as f64 / 60.0);
            let (f, g) = f_g_eval(a).unwrap();
            assert!(f > prev.0 && g > prev.1);
            prev = (f, g);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(f_g_eval(0.05), Err(Error::Domain(_))));
        assert!(matches!(f_g_eval(-0.1), Err(Error::Domain(_))));
        assert!(f_g_eval(1e-6).is_ok());
    }

    #[test]
    fn theorem1_examples() {
        let v = theorem1_test(&StochasticMatrix::two_by_two(1e-7, 0.5).unwrap()).unwrap();
        assert!(v.in_q2_complement && !v.swapped);
        let v = theorem1_test(&StochasticMatrix::two_by_two(1e-7, 0.99).unwrap()).unwrap();
        assert!(!v.in_q2_complement);
        let v = theorem1_test(&StochasticMatrix::two_by_two(0.5, 0.5).unwrap()).unwrap();
        assert!(!v.in_q2_complement && v.f_a.is_none());
        let v = theorem1_test(&StochasticMatrix::two_by_two(0.5, 1e-7).unwrap()).unwrap();
        assert!(v.in_q2_complement && v.swapped);
        assert_eq!((v.a, v.b), (1e-7, 0.5));
    }

    #[test]
    fn region_is_open() {
        let a = 1e-7;
        let (f, g) = f_g_eval(a).unwrap();
        let lo = f * (2.0 - f);
        let at = |b: f64| {
            theorem1_test(&StochasticMatrix::two_by_two(a, b).unwrap())
                .unwrap()
                .in_q2_complement
        };
        assert!(!at(lo));
        assert!(at(lo + 1e-9));
        assert!(!at(1.0 - g));
        assert!(at(1.0 - g - 1e-9));
    }

    #[test]
    fn theorem1_rejects_other_dims() {
        assert!(matches!(
            theorem1_test(&StochasticMatrix::identity(3)),
            Err(Error::UnsupportedDimension { .. })
        ));
    }
}
