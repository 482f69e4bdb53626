//! Layered decision pipeline behind `check` and `certify`.

use embedlab_core::certify::{f_g_eval, theorem1_test, Theorem1Verdict};
use embedlab_core::lindblad::{channel_at, classical_action_entries};
use embedlab_core::optimizer::{
    decode, embed_search, Parameterization, SearchOptions, SearchResult, SearchVerdict,
};
use embedlab_core::stochastic::{
    classical_embeddable_2x2, classify_extreme, necessary_classical_condition, theorem2_detect,
    ExtremeClassification, ExtremeVerdict, RateMatrix, StochasticMatrix, Theorem2Certificate,
    MAX_DETECT_DIM,
};
use serde::Serialize;

use crate::files::LindbladianJson;
use crate::{CliError, EXIT_EMBEDDABLE, EXIT_INCONCLUSIVE, EXIT_NOT_EMBEDDABLE};

/// Agreement required between a classical witness and the target.
const CLASSICAL_WITNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Embeddable,
    NotEmbeddable,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Embeddable => EXIT_EMBEDDABLE,
            Verdict::NotEmbeddable => EXIT_NOT_EMBEDDABLE,
            Verdict::Inconclusive => EXIT_INCONCLUSIVE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `T = e^{L t}` for a rate matrix `L`, lifted to a GKLS generator.
    ClassicalGenerator {
        rates_row_major: Vec<f64>,
        time: f64,
        closure_point: bool,
    },
    /// `T` lies in the excluded region near a vanishing diagonal entry.
    SmallDiagonalRegion(Theorem1Verdict),
    /// A set collapsed onto a permuted set and then fed from outside.
    CollapseObstruction(Theorem2Certificate),
    /// Classification of a 0/1 matrix by its functional graph.
    ExtremeClassification(ExtremeClassification),
    /// A generator whose classical action is within `delta` of `T`.
    NumericalWitness(Witness),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub lindbladian: LindbladianJson,
    pub time: f64,
    pub objective: f64,
    pub delta: f64,
    pub search: SearchResult,
}

impl Certificate {
    pub fn describe(&self) -> String {
        match self {
            Certificate::ClassicalGenerator {
                rates_row_major,
                time,
                closure_point,
            } => {
                if rates_row_major.iter().all(|&r| r == 0.0) {
                    "classical generator L=0".into()
                } else {
                    let limit = if *closure_point { " (closure limit)" } else { "" };
                    format!("classical generator L={rates_row_major:?} at t={time}{limit}")
                }
            }
            Certificate::SmallDiagonalRegion(v) => format!(
                "small-diagonal region: a={:e}, b={}, f(a)(2-f(a))={:.6} < b < 1-g(a)={:.6}{}",
                v.a,
                v.b,
                v.f_a.map_or(f64::NAN, |f| f * (2.0 - f)),
                v.g_a.map_or(f64::NAN, |g| 1.0 - g),
                if v.swapped { " (roles of a and b exchanged)" } else { "" }
            ),
            Certificate::CollapseObstruction(c) => format!(
                "collapse obstruction: invariant set {:?} permuted, set {:?} collapses onto {}, column {} maps into it",
                one_based(&c.invariant_set),
                one_based(&c.collapsing_set),
                c.anchor + 1,
                c.witness + 1
            ),
            Certificate::ExtremeClassification(c) => match (&c.verdict, &c.obstruction) {
                (ExtremeVerdict::Embeddable, _) => format!(
                    "extreme matrix with every tail entering its core {:?} directly",
                    one_based(&c.core)
                ),
                (ExtremeVerdict::NotEmbeddable, Some(o)) => format!(
                    "extreme matrix with a tail of length {} reaching the core at {} via {:?}",
                    o.k,
                    o.core_entry + 1,
                    one_based(&o.path)
                ),
                (ExtremeVerdict::NotEmbeddable, None) => "extreme matrix, not embeddable".into(),
            },
            Certificate::NumericalWitness(w) => format!(
                "numerical witness: objective {:.3e} ≤ δ={:e} at t={:.6} ({}, {} restarts, seed {})",
                w.objective,
                w.delta,
                w.time,
                w.search.parameterization,
                w.search.restarts_used,
                w.search.seed
            ),
        }
    }

    /// Re-checks the certificate against `t` from scratch.
    pub fn verify(&self, t: &StochasticMatrix) -> bool {
        match self {
            Certificate::ClassicalGenerator {
                rates_row_major,
                time,
                ..
            } => RateMatrix::new(rates_row_major.clone(), t.dim())
                .and_then(|r| r.exp(*time))
                .is_ok_and(|e| e.max_abs_diff(t) <= CLASSICAL_WITNESS_TOL),
            Certificate::SmallDiagonalRegion(v) => {
                if t.dim() != 2 || !v.in_q2_complement {
                    return false;
                }
                let (a, b) = if v.swapped {
                    (t.get(1, 1), t.get(0, 0))
                } else {
                    (t.get(0, 0), t.get(1, 1))
                };
                a == v.a
                    && b == v.b
                    && a <= embedlab_core::certify::SMALL_ENTRY_LIMIT
                    && f_g_eval(a).is_ok_and(|(f, g)| f * (2.0 - f) < b && b < 1.0 - g)
            }
            Certificate::CollapseObstruction(c) => c.verify(t),
            Certificate::ExtremeClassification(c) => {
                classify_extreme(t).is_ok_and(|fresh| &fresh == c)
            }
            Certificate::NumericalWitness(w) => {
                let Ok(l) = w.lindbladian.to_lindbladian() else {
                    return false;
                };
                channel_at(&l, w.time).is_ok_and(|ch| {
                    let action = classical_action_entries(&ch);
                    let dev = t
                        .entries()
                        .iter()
                        .zip(&action)
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max);
                    dev <= w.delta
                })
            }
        }
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Embeddable,
    NotEmbeddable,
    NoConclusion,
    Skipped,
}

/// One analytic test and what it established.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attempt {
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl Attempt {
    fn new(name: &'static str, outcome: Outcome, detail: impl Serialize) -> Self {
        Self {
            name,
            outcome,
            detail: serde_json::to_value(detail).unwrap_or(serde_json::Value::Null),
            certificate: None,
        }
    }

    fn skipped(name: &'static str, reason: String) -> Self {
        Self::new(name, Outcome::Skipped, serde_json::json!({ "reason": reason }))
    }

    fn with(mut self, c: Certificate) -> Self {
        self.certificate = Some(c);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub dim: usize,
    pub attempts: Vec<Attempt>,
    /// Classically embeddable, when decided.
    pub classical: Option<bool>,
    pub verdict: Verdict,
    /// Name of the first attempt that decided the verdict.
    pub decided_by: Option<&'static str>,
    pub certificate: Option<Certificate>,
    pub certificate_verified: Option<bool>,
}

impl CertifyReport {
    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }
}

pub const ATTEMPT_DETERMINANT: &str = "determinant_condition";
pub const ATTEMPT_IDENTITY: &str = "identity";
pub const ATTEMPT_CLASSICAL_2X2: &str = "classical_2x2";
pub const ATTEMPT_SMALL_DIAGONAL: &str = "small_diagonal_region";
pub const ATTEMPT_COLLAPSE: &str = "collapse_obstruction";
pub const ATTEMPT_EXTREME: &str = "extreme_classification";
pub const ATTEMPT_SEARCH: &str = "numerical_search";

fn classical_certificate(rates: &RateMatrix, time: f64, closure_point: bool) -> Certificate {
    Certificate::ClassicalGenerator {
        rates_row_major: rates.entries().to_vec(),
        time,
        closure_point,
    }
}

/// Every analytic test that applies to `t`, in pipeline order.
pub fn analytic_attempts(t: &StochasticMatrix) -> Result<Vec<Attempt>, CliError> {
    let d = t.dim();
    let mut out = Vec::new();

    let cond = necessary_classical_condition(t);
    out.push(Attempt::new(ATTEMPT_DETERMINANT, Outcome::NoConclusion, &cond));

    if t.max_abs_diff(&StochasticMatrix::identity(d)) == 0.0 {
        out.push(
            Attempt::new(ATTEMPT_IDENTITY, Outcome::Embeddable, serde_json::json!({}))
                .with(classical_certificate(&RateMatrix::zeros(d), 1.0, false)),
        );
    }

    if d == 2 {
        match classical_embeddable_2x2(t)? {
            Some(w) => out.push(
                Attempt::new(ATTEMPT_CLASSICAL_2X2, Outcome::Embeddable, &w)
                    .with(classical_certificate(&w.generator, w.time, w.closure_point)),
            ),
            None => out.push(Attempt::new(
                ATTEMPT_CLASSICAL_2X2,
                Outcome::NoConclusion,
                serde_json::json!({ "reason": "T_11 + T_22 < 1" }),
            )),
        }
        let v = theorem1_test(t)?;
        if v.in_q2_complement {
            let c = Certificate::SmallDiagonalRegion(v.clone());
            out.push(Attempt::new(ATTEMPT_SMALL_DIAGONAL, Outcome::NotEmbeddable, &v).with(c));
        } else {
            out.push(Attempt::new(ATTEMPT_SMALL_DIAGONAL, Outcome::NoConclusion, &v));
        }
    } else {
        out.push(Attempt::skipped(ATTEMPT_CLASSICAL_2X2, format!("d = {d}")));
        out.push(Attempt::skipped(ATTEMPT_SMALL_DIAGONAL, format!("d = {d}")));
    }

    if d > MAX_DETECT_DIM {
        out.push(Attempt::skipped(
            ATTEMPT_COLLAPSE,
            format!("detector limited to d ≤ {MAX_DETECT_DIM}"),
        ));
    } else {
        match theorem2_detect(t)? {
            Some(c) => out.push(
                Attempt::new(ATTEMPT_COLLAPSE, Outcome::NotEmbeddable, &c)
                    .with(Certificate::CollapseObstruction(c)),
            ),
            None => out.push(Attempt::new(
                ATTEMPT_COLLAPSE,
                Outcome::NoConclusion,
                serde_json::json!({ "found": false }),
            )),
        }
    }

    if t.is_extreme() {
        let c = classify_extreme(t)?;
        let outcome = match c.verdict {
            ExtremeVerdict::Embeddable => Outcome::Embeddable,
            ExtremeVerdict::NotEmbeddable => Outcome::NotEmbeddable,
        };
        out.push(Attempt::new(ATTEMPT_EXTREME, outcome, &c).with(Certificate::ExtremeClassification(c)));
    } else {
        out.push(Attempt::skipped(ATTEMPT_EXTREME, "matrix is not 0/1".into()));
    }
    Ok(out)
}

fn classical_flag(t: &StochasticMatrix, attempts: &[Attempt]) -> Option<bool> {
    if attempts
        .iter()
        .any(|a| a.name == ATTEMPT_IDENTITY || (a.name == ATTEMPT_CLASSICAL_2X2 && a.outcome == Outcome::Embeddable))
    {
        return Some(true);
    }
    if t.dim() == 2 {
        return Some(false);
    }
    // The determinant condition is necessary for classical embeddability.
    let failed = attempts
        .iter()
        .any(|a| a.name == ATTEMPT_DETERMINANT && a.detail["outcome"] != "pass");
    failed.then_some(false)
}

fn decide(t: &StochasticMatrix, attempts: Vec<Attempt>) -> CertifyReport {
    let classical = classical_flag(t, &attempts);
    let decisive = attempts
        .iter()
        .find(|a| matches!(a.outcome, Outcome::Embeddable | Outcome::NotEmbeddable));
    let (verdict, decided_by, certificate) = match decisive {
        Some(a) => (
            if a.outcome == Outcome::Embeddable {
                Verdict::Embeddable
            } else {
                Verdict::NotEmbeddable
            },
            Some(a.name),
            a.certificate.clone(),
        ),
        None => (Verdict::Inconclusive, None, None),
    };
    let certificate_verified = certificate.as_ref().map(|c| c.verify(t));
    CertifyReport {
        dim: t.dim(),
        attempts,
        classical,
        verdict,
        decided_by,
        certificate,
        certificate_verified,
    }
}

/// Analytic certificates only; no optimization.
pub fn certify(t: &StochasticMatrix) -> Result<CertifyReport, CliError> {
    Ok(decide(t, analytic_attempts(t)?))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckOptions {
    pub search: SearchOptions,
    /// Defaults to the general family of the target's dimension.
    pub parameterization: Option<Parameterization>,
}

/// Analytic certificates, then the numerical search when none decides.
/// A negative verdict always carries a certificate that re-verifies.
pub fn check(t: &StochasticMatrix, opts: &CheckOptions) -> Result<CertifyReport, CliError> {
    let mut attempts = analytic_attempts(t)?;
    if attempts
        .iter()
        .any(|a| matches!(a.outcome, Outcome::Embeddable | Outcome::NotEmbeddable))
    {
        return Ok(decide(t, attempts));
    }
    let p = opts
        .parameterization
        .unwrap_or_else(|| Parameterization::general_for(t.dim()));
    let result = embed_search(t, p, &opts.search)?;
    let attempt = match result.verdict {
        SearchVerdict::EmbeddableAtDelta => {
            let (l, time) = decode(&result.best_params, p)?;
            let w = Witness {
                lindbladian: LindbladianJson::from_lindbladian(&l),
                time,
                objective: result.best_objective,
                delta: opts.search.delta,
                search: result.clone(),
            };
            Attempt::new(ATTEMPT_SEARCH, Outcome::Embeddable, &result)
                .with(Certificate::NumericalWitness(w))
        }
        SearchVerdict::Inconclusive => Attempt::new(ATTEMPT_SEARCH, Outcome::NoConclusion, &result),
    };
    attempts.push(attempt);
    Ok(decide(t, attempts))
}

/// Human-readable rendering of a report.
pub fn render(report: &CertifyReport) -> String {
    let mut s = String::new();
    for a in &report.attempts {
        let outcome = match a.outcome {
            Outcome::Embeddable => "embeddable",
            Outcome::NotEmbeddable => "not embeddable",
            Outcome::NoConclusion => "no conclusion",
            Outcome::Skipped => "skipped",
        };
        s.push_str(&format!("{:<24} {outcome}\n", a.name));
    }
    if let Some(c) = report.classical {
        s.push_str(&format!("classically embeddable: {}\n", if c { "yes" } else { "no" }));
    }
    let verdict = match report.verdict {
        Verdict::Embeddable => "embeddable",
        Verdict::NotEmbeddable => "not embeddable",
        Verdict::Inconclusive => "inconclusive",
    };
    s.push_str(&format!("verdict: {verdict}\n"));
    if let Some(c) = &report.certificate {
        s.push_str(&format!("certificate: {}\n", c.describe()));
        if let Some(ok) = report.certificate_verified {
            s.push_str(&format!("certificate re-verified: {}\n", if ok { "yes" } else { "NO" }));
        }
    }
    if report.verdict == Verdict::Inconclusive {
        if let Some(a) = report.attempts.iter().find(|a| a.name == ATTEMPT_SEARCH) {
            s.push_str(&format!(
                "best objective {} above δ; no certificate either way\n",
                a.detail["best_objective"]
            ));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collapse_example() -> StochasticMatrix {
        StochasticMatrix::new(vec![1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0], 3).unwrap()
    }

    #[test]
    fn identity_is_classical_zero_generator() {
        let r = certify(&StochasticMatrix::identity(2)).unwrap();
        assert_eq!(r.verdict, Verdict::Embeddable);
        assert_eq!(r.decided_by, Some(ATTEMPT_IDENTITY));
        assert_eq!(r.certificate.as_ref().unwrap().describe(), "classical generator L=0");
        assert_eq!(r.certificate_verified, Some(true));
        assert_eq!(r.classical, Some(true));
    }

    #[test]
    fn collapse_matrix_is_certified() {
        let t = collapse_example();
        let r = certify(&t).unwrap();
        assert_eq!(r.verdict, Verdict::NotEmbeddable);
        assert_eq!(r.decided_by, Some(ATTEMPT_COLLAPSE));
        assert_eq!(r.certificate_verified, Some(true));
        // the extreme classification agrees
        let ext = r.attempts.iter().find(|a| a.name == ATTEMPT_EXTREME).unwrap();
        assert_eq!(ext.outcome, Outcome::NotEmbeddable);
    }

    #[test]
    fn small_diagonal_point_is_blocked() {
        let t = StochasticMatrix::two_by_two(1e-7, 0.5).unwrap();
        let r = certify(&t).unwrap();
        assert_eq!(r.decided_by, Some(ATTEMPT_SMALL_DIAGONAL));
        assert_eq!(r.classical, Some(false));
        assert_eq!(r.certificate_verified, Some(true));
    }

    #[test]
    fn tampered_certificates_fail_verification() {
        let t = StochasticMatrix::two_by_two(1e-7, 0.5).unwrap();
        let c = certify(&t).unwrap().certificate.unwrap();
        assert!(!c.verify(&StochasticMatrix::two_by_two(1e-7, 0.99).unwrap()));
        let c = certify(&collapse_example()).unwrap().certificate.unwrap();
        assert!(!c.verify(&StochasticMatrix::identity(3)));
    }

    #[test]
    fn mixing_family_member_is_certified() {
        // states 2 and 3 collapse onto 1; state 4 splits between them
        let (p, q) = (0.3, 0.7);
        #[rustfmt::skip]
        let t = StochasticMatrix::new(vec![
            1.0, 1.0, 1.0, 0.0,
            0.0, 0.0, 0.0, p,
            0.0, 0.0, 0.0, q,
            0.0, 0.0, 0.0, 0.0,
        ], 4).unwrap();
        let r = certify(&t).unwrap();
        assert_eq!(r.verdict, Verdict::NotEmbeddable);
        assert_eq!(r.decided_by, Some(ATTEMPT_COLLAPSE));
        assert_eq!(r.certificate_verified, Some(true));
    }

    #[test]
    fn check_runs_search_when_undecided() {
        let t = StochasticMatrix::two_by_two(0.5, 0.5).unwrap();
        let opts = CheckOptions {
            search: SearchOptions::new(16, 1e-4, 3),
            parameterization: Some(Parameterization::ReducedQubit),
        };
        let r = check(&t, &opts).unwrap();
        // a + b = 1 is a classical closure point, decided before the search
        assert_eq!(r.decided_by, Some(ATTEMPT_CLASSICAL_2X2));

        let t = StochasticMatrix::two_by_two(0.3, 0.4).unwrap();
        let r = check(&t, &opts).unwrap();
        assert_eq!(r.attempts.last().unwrap().name, ATTEMPT_SEARCH);
        if r.verdict == Verdict::Embeddable {
            assert_eq!(r.certificate_verified, Some(true));
        } else {
            assert_eq!(r.verdict, Verdict::Inconclusive);
        }
    }
}
