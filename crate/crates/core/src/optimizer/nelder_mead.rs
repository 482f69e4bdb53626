//! Derivative-free simplex minimization.

use serde::Serialize;

use crate::error::{Error, Result};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
/// Attempts to place an initial vertex at a finite value before giving up.
const VERTEX_RETRIES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop when every vertex lies within this ∞-distance of the best one.
    pub x_tolerance: f64,
    /// Stop when the spread of simplex values falls below this.
    pub f_tolerance: f64,
    /// Stop as soon as the best value reaches this.
    pub target: Option<f64>,
    /// Offset along each axis for the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            x_tolerance: 1e-10,
            f_tolerance: 1e-12,
            target: None,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    SimplexSize,
    ValueSpread,
    MaxIterations,
    Target,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Non-finite evaluations, counted and treated as `+∞`.
    pub soft_failures: usize,
    pub stop: StopReason,
}

struct Counted<F> {
    f: F,
    evaluations: usize,
    soft_failures: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            v
        } else {
            self.soft_failures += 1;
            f64::INFINITY
        }
    }
}

fn affine(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    // a + s (a − b)
    a.iter().zip(b).map(|(x, y)| x + s * (x - y)).collect()
}

/// Minimizes `f` from `x0` with coefficients (1, 2, ½, ½). Non-finite values
/// count as soft failures and compare as `+∞`; an initial vertex with such a
/// value is pulled toward `x0` until finite.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 {
        return Err(Error::Validation("cannot minimize over zero parameters".into()));
    }
    let mut f = Counted {
        f,
        evaluations: 0,
        soft_failures: 0,
    };
    let f0 = f.eval(x0);
    if !f0.is_finite() {
        return Err(Error::Domain("objective is not finite at the start point".into()));
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut step = opts.initial_step;
        let mut vertex = x0.to_vec();
        vertex[i] += step;
        let mut value = f.eval(&vertex);
        for _ in 0..VERTEX_RETRIES {
            if value.is_finite() {
                break;
            }
            step *= 0.5;
            vertex[i] = x0[i] + step;
            value = f.eval(&vertex);
        }
        simplex.push((vertex, value));
    }

    let mut iterations = 0;
    let stop = loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        if opts.target.is_some_and(|t| best <= t) {
            break StopReason::Target;
        }
        let worst = simplex[n].1;
        let spread = worst - best;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter < opts.x_tolerance {
            break StopReason::SimplexSize;
        }
        if spread.is_finite() && spread < opts.f_tolerance {
            break StopReason::ValueSpread;
        }
        if iterations >= opts.max_iterations {
            break StopReason::MaxIterations;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let xr = affine(&centroid, &simplex[n].0, REFLECT);
        let fr = f.eval(&xr);
        if fr < simplex[0].1 {
            let xe = affine(&centroid, &simplex[n].0, EXPAND);
            let fe = f.eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        // Contraction: outside if the reflection improved on the worst.
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = affine(&centroid, &simplex[n].0, CONTRACT);
            let fc = f.eval(&xc);
            (xc, fc)
        } else {
            let xc = affine(&centroid, &simplex[n].0, -CONTRACT);
            let fc = f.eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for (v, fv) in simplex[1..].iter_mut() {
            for (x, a) in v.iter_mut().zip(&anchor) {
                *x = a + SHRINK * (*x - a);
            }
            *fv = f.eval(v);
        }
    };
    let (x, fbest) = simplex.swap_remove(0);
    Ok(NelderMeadResult {
        x,
        f: fbest,
        iterations,
        evaluations: f.evaluations,
        soft_failures: f.soft_failures,
        stop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_bowl() {
        let r = nelder_mead(
            |x| x.iter().map(|v| v * v).sum(),
            &[1.0, 1.0],
            &NelderMeadOptions::default(),
        )
        .unwrap();
        assert!(r.f < 1e-10, "{}", r.f);
    }

    #[test]
    fn rosenbrock() {
        let rosen = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = nelder_mead(rosen, &[-1.2, 1.0], &NelderMeadOptions::default()).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn target_stops_early() {
        let opts = NelderMeadOptions {
            target: Some(1e-2),
            ..Default::default()
        };
        let r = nelder_mead(|x| x[0] * x[0], &[1.0], &opts).unwrap();
        assert_eq!(r.stop, StopReason::Target);
        assert!(r.f <= 1e-2);
    }

    #[test]
    fn iteration_cap() {
        let opts = NelderMeadOptions {
            max_iterations: 5,
            ..Default::default()
        };
        let r = nelder_mead(|x| (x[0] - 3.0).abs(), &[0.0], &opts).unwrap();
        assert_eq!(r.stop, StopReason::MaxIterations);
        assert_eq!(r.iterations, 5);
    }

    #[test]
    fn non_finite_regions_are_soft_failures() {
        let f = |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { (x[0] + 1.0).powi(2) };
        let opts = NelderMeadOptions {
            initial_step: 1.0,
            ..Default::default()
        };
        let r = nelder_mead(f, &[0.0], &opts).unwrap();
        assert!(r.soft_failures > 0);
        assert!((r.x[0] + 1.0).abs() < 1e-5);
    }

    #[test]
    fn bad_start_rejected() {
        let r = nelder_mead(|_| f64::INFINITY, &[0.0], &NelderMeadOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1] + x[0]).powi(4);
        let a = nelder_mead(f, &[2.0, -1.0], &NelderMeadOptions::default()).unwrap();
        let b = nelder_mead(f, &[2.0, -1.0], &NelderMeadOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
