//! Explicit generators for targets of known structure.

use std::collections::BTreeMap;

use embedlab_core::lindblad::{
    channel_at, classical_action_entries, hamiltonian_from_unitary, lift_classical,
    theorem3_generator, Lindbladian, DEFAULT_FINAL_TIME, DEFAULT_GAMMA,
};
use embedlab_core::matcore::{ComplexMatrix, C64};
use embedlab_core::stochastic::{classical_embeddable_2x2, validate, StochasticMatrix};
use serde::Serialize;

use crate::files::{LindbladianJson, Target};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Lindblad lift of a classical rate matrix.
    ClassicalLift,
    /// Hamiltonian evolution reproducing a unistochastic target.
    Unitary,
    /// Strong decay of copied columns onto an embeddable block.
    Theorem3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructOptions {
    pub method: Method,
    pub gamma: f64,
    /// Evolution time for stochastic targets; rate files carry their own.
    pub final_time: f64,
}

impl ConstructOptions {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            gamma: DEFAULT_GAMMA,
            final_time: DEFAULT_FINAL_TIME,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Construction {
    pub method: Method,
    pub time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub lindbladian: LindbladianJson,
    /// `max_ij |T_ij − action_ij|`.
    pub objective: f64,
    pub target_row_major: Vec<f64>,
    pub classical_action_row_major: Vec<f64>,
}

/// Multiplies the generator by `factor ≥ 0`.
pub fn rescaled(l: &Lindbladian, factor: f64) -> Result<Lindbladian, CliError> {
    let amp = factor.sqrt();
    Ok(Lindbladian::new(
        l.hamiltonian().scale_real(factor),
        l.kraus_ops().iter().map(|a| a.scale_real(amp)).collect(),
    )?)
}

fn permutation_unitary(images: &[usize]) -> ComplexMatrix {
    let d = images.len();
    let mut u = ComplexMatrix::zeros(d, d);
    for (j, &i) in images.iter().enumerate() {
        u[(i, j)] = C64::new(1.0, 0.0);
    }
    u
}

/// `[[√a, i√(1−a)], [i√(1−a), √a]]`, whose squared moduli give the
/// bistochastic matrix with diagonal `a`.
pub fn bistochastic_unitary(a: f64) -> ComplexMatrix {
    let c = C64::new(a.sqrt(), 0.0);
    let s = C64::new(0.0, (1.0 - a).sqrt());
    ComplexMatrix::new(2, 2, vec![c, s, s, c]).expect("2x2")
}

fn unitary_generator(t: &StochasticMatrix, final_time: f64) -> Result<Option<Lindbladian>, CliError> {
    let u = if let Some(images) = t.images().filter(|_| t.is_permutation()) {
        permutation_unitary(&images)
    } else if t.dim() == 2 && (t.get(0, 0) - t.get(1, 1)).abs() <= t.tolerance() {
        bistochastic_unitary(t.get(0, 0))
    } else {
        return Ok(None);
    };
    let l = hamiltonian_from_unitary(&u)?;
    Ok(Some(rescaled(&l, 1.0 / final_time)?))
}

fn classical_generator(t: &StochasticMatrix, final_time: f64) -> Result<Option<Lindbladian>, CliError> {
    if t.max_abs_diff(&StochasticMatrix::identity(t.dim())) == 0.0 {
        return Ok(Some(Lindbladian::zero(t.dim())));
    }
    if t.dim() != 2 {
        return Ok(None);
    }
    Ok(match classical_embeddable_2x2(t)? {
        Some(w) => Some(rescaled(&lift_classical(&w.generator), w.time / final_time)?),
        None => None,
    })
}

/// Generator for a block that is the identity, a permutation, classically
/// embeddable 2×2, or bistochastic 2×2.
fn block_generator(r: &StochasticMatrix, final_time: f64) -> Result<Lindbladian, CliError> {
    if let Some(l) = classical_generator(r, final_time)? {
        return Ok(l);
    }
    if let Some(l) = unitary_generator(r, final_time)? {
        return Ok(l);
    }
    Err(CliError::Structure(format!(
        "the {0}x{0} block on the occupied states has no known generator; it must be the identity, a permutation, or 2x2 with a + b ≥ 1 or equal diagonal entries",
        r.dim()
    )))
}

fn check_time(final_time: f64) -> Result<(), CliError> {
    if final_time.is_finite() && final_time > 0.0 {
        Ok(())
    } else {
        Err(CliError::Parse(format!("final time must be positive, got {final_time}")))
    }
}

/// Builds `(𝓛, t)` for the target and reports how closely it is reproduced.
pub fn construct(target: &Target, opts: &ConstructOptions) -> Result<Construction, CliError> {
    check_time(opts.final_time)?;
    let (l, time, t, gamma) = match (opts.method, target) {
        (Method::ClassicalLift, Target::Rates { rates, time }) => {
            (lift_classical(rates), *time, rates.exp(*time)?, None)
        }
        (Method::ClassicalLift, Target::Stochastic(t)) => {
            let l = classical_generator(t, opts.final_time)?.ok_or_else(|| {
                CliError::Structure(
                    "no classical generator is known for this target; supply a rate-matrix file, the identity, or a 2x2 matrix with a + b ≥ 1".into(),
                )
            })?;
            (l, opts.final_time, t.clone(), None)
        }
        (Method::Unitary, Target::Stochastic(t)) => {
            let l = unitary_generator(t, opts.final_time)?.ok_or_else(|| {
                CliError::Structure(
                    "unitary construction needs a permutation matrix or a 2x2 matrix with equal diagonal entries".into(),
                )
            })?;
            (l, opts.final_time, t.clone(), None)
        }
        (Method::Theorem3, Target::Stochastic(t)) => {
            let l = copied_column_generator(t, opts.gamma, opts.final_time)?;
            (l, opts.final_time, t.clone(), Some(opts.gamma))
        }
        (method, Target::Rates { .. }) => {
            return Err(CliError::Structure(format!(
                "method {method:?} needs a column-stochastic target, not a rate matrix"
            )))
        }
    };
    let action = classical_action_entries(&channel_at(&l, time)?);
    let objective = t
        .entries()
        .iter()
        .zip(&action)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(Construction {
        method: opts.method,
        time,
        gamma,
        lindbladian: LindbladianJson::from_lindbladian(&l),
        objective,
        target_row_major: t.entries().to_vec(),
        classical_action_row_major: action,
    })
}

/// The occupied states `K` (non-zero rows) carry a block `R = T[K, K]`;
/// every other column must repeat a column of `K`. Levels are relabeled so
/// `K` comes first, the construction is applied, and labels are restored.
pub fn copied_column_generator(
    t: &StochasticMatrix,
    gamma: f64,
    final_time: f64,
) -> Result<Lindbladian, CliError> {
    check_time(final_time)?;
    let d = t.dim();
    let tol = t.tolerance();
    let occupied: Vec<usize> = (0..d)
        .filter(|&i| (0..d).any(|j| t.get(i, j) > tol))
        .collect();
    let mut copies = BTreeMap::new();
    for j in (0..d).filter(|j| !occupied.contains(j)) {
        let source = occupied.iter().copied().find(|&c| {
            (0..d).all(|i| (t.get(i, j) - t.get(i, c)).abs() <= tol)
        });
        match source {
            Some(c) => {
                copies.insert(j, c);
            }
            None => {
                return Err(CliError::Structure(format!(
                    "column {} is not a copy of any column of the occupied states {:?}",
                    j + 1,
                    occupied.iter().map(|i| i + 1).collect::<Vec<_>>()
                )))
            }
        }
    }
    // order[new] = old
    let order: Vec<usize> = occupied.iter().copied().chain(copies.keys().copied()).collect();
    let mut position = vec![0; d];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let k = occupied.len();
    let mut block_entries = Vec::with_capacity(k * k);
    for &i in &occupied {
        for &j in &occupied {
            block_entries.push(t.get(i, j));
        }
    }
    let block = validate(block_entries, k, tol)?;
    let inner = block_generator(&block, final_time)?.embedded(d, &(0..k).collect::<Vec<_>>())?;
    let map: BTreeMap<usize, usize> = copies
        .iter()
        .map(|(&j, &c)| (position[j], position[c]))
        .collect();
    let built = theorem3_generator(&inner, &map, gamma)?;
    Ok(built.relabeled(&order)?)
}
