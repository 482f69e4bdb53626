//! Column-stochastic matrices and the classical side of the embedding problem.
//!
//! Convention: `T[(i, j)]` is the probability of the transition `j → i`, so
//! every column sums to one.

mod extreme;
mod theorem2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{expm, ComplexMatrix};

pub use extreme::{
    classify_extreme, count_quantum_embeddable_extreme, enumerate_extreme, ExtremeClassification,
    ExtremeIter, ExtremeVerdict, Obstruction, MAX_ENUMERATION_DIM,
};
pub use theorem2::{theorem2_detect, Theorem2Certificate, MAX_DETECT_DIM};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Slack for the determinant inequalities.
pub const CONDITION_SLACK: f64 = 1e-12;
const RATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticMatrix {
    dim: usize,
    entries: Vec<f64>,
    tolerance: f64,
}

impl StochasticMatrix {
    /// Validates with the default tolerance.
    pub fn new(entries: Vec<f64>, dim: usize) -> Result<Self> {
        validate(entries, dim, DEFAULT_TOLERANCE)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self {
            dim,
            entries,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// `[[a, 1−b], [1−a, b]]`
    pub fn two_by_two(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, 1.0 - b, 1.0 - a, b], 2)
    }

    /// Extreme matrix sending state `j` to `images[j]`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let d = images.len();
        if let Some(&bad) = images.iter().find(|&&i| i >= d) {
            return Err(Error::Validation(format!("image {bad} out of range for d = {d}")));
        }
        let mut entries = vec![0.0; d * d];
        for (j, &i) in images.iter().enumerate() {
            entries[i * d + j] = 1.0;
        }
        Ok(Self {
            dim: d,
            entries,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    /// Entry equals one up to the matrix tolerance.
    pub fn is_one(&self, i: usize, j: usize) -> bool {
        (self.get(i, j) - 1.0).abs() <= self.tolerance
    }

    /// Row index of the unit entry when column `j` is deterministic.
    pub fn deterministic_image(&self, j: usize) -> Option<usize> {
        (0..self.dim).find(|&i| self.is_one(i, j))
    }

    pub fn is_extreme(&self) -> bool {
        self.entries
            .iter()
            .all(|&x| x.abs() <= self.tolerance || (x - 1.0).abs() <= self.tolerance)
    }

    /// Column images when every column is deterministic.
    pub fn images(&self) -> Option<Vec<usize>> {
        (0..self.dim).map(|j| self.deterministic_image(j)).collect()
    }

    pub fn is_permutation(&self) -> bool {
        self.images().is_some_and(|im| {
            let mut seen = vec![false; self.dim];
            im.iter().all(|&i| !std::mem::replace(&mut seen[i], true))
        })
    }

    /// Relabels states: entry `(i, j)` moves to `(perm[i], perm[j])`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let d = self.dim;
        let mut entries = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[perm[i] * d + perm[j]] = self.get(i, j);
            }
        }
        Self {
            dim: d,
            entries,
            tolerance: self.tolerance,
        }
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_real(self.dim, self.dim, &self.entries).expect("finite entries")
    }

    /// Largest entrywise deviation from another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> f64 {
        determinant(self.dim, &self.entries)
    }
}

/// Checks entries and column sums, clamping entries into `[0, 1]`.
pub fn validate(entries: Vec<f64>, dim: usize, tolerance: f64) -> Result<StochasticMatrix> {
    if dim == 0 {
        return Err(Error::Validation("dimension must be at least 1".into()));
    }
    if entries.len() != dim * dim {
        return Err(Error::Dimension(format!(
            "{} entries for a {dim}x{dim} matrix",
            entries.len()
        )));
    }
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(Error::Validation(format!("bad tolerance {tolerance}")));
    }
    for (k, &x) in entries.iter().enumerate() {
        if !x.is_finite() || x < -tolerance || x > 1.0 + tolerance {
            return Err(Error::EntryOutOfRange {
                row: k / dim,
                column: k % dim,
                value: x,
            });
        }
    }
    for j in 0..dim {
        let sum: f64 = (0..dim).map(|i| entries[i * dim + j]).sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(Error::ColumnSum { column: j, sum });
        }
    }
    let entries = entries.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
    Ok(StochasticMatrix {
        dim,
        entries,
        tolerance,
    })
}

/// Determinant by LU with partial pivoting.
pub fn determinant(n: usize, entries: &[f64]) -> f64 {
    let mut a = entries.to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
            .unwrap();
        if a[p * n + k] == 0.0 {
            return 0.0;
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for r in (k + 1)..n {
            let f = a[r * n + k] / pivot;
            for c in k..n {
                a[r * n + c] -= f * a[k * n + c];
            }
        }
    }
    det
}

/// Outcome of `∏ T_ii ≥ det T ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ClassicalCondition {
    Pass {
        diagonal_product: f64,
        determinant: f64,
    },
    NegativeDeterminant {
        determinant: f64,
    },
    DeterminantExceedsDiagonal {
        diagonal_product: f64,
        determinant: f64,
    },
}

impl ClassicalCondition {
    pub fn passed(&self) -> bool {
        matches!(self, ClassicalCondition::Pass { .. })
    }
}

/// Necessary condition for classical embeddability.
pub fn necessary_classical_condition(t: &StochasticMatrix) -> ClassicalCondition {
    let det = t.determinant();
    let prod: f64 = (0..t.dim()).map(|i| t.get(i, i)).product();
    if det < -CONDITION_SLACK {
        ClassicalCondition::NegativeDeterminant { determinant: det }
    } else if det > prod + CONDITION_SLACK {
        ClassicalCondition::DeterminantExceedsDiagonal {
            diagonal_product: prod,
            determinant: det,
        }
    } else {
        ClassicalCondition::Pass {
            diagonal_product: prod,
            determinant: det,
        }
    }
}

/// Markov generator: non-negative off-diagonals, zero column sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl RateMatrix {
    pub fn new(entries: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} entries for a {dim}x{dim} rate matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("rate matrix has non-finite entries".into()));
        }
        let scale = entries.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for j in 0..dim {
            for i in 0..dim {
                let x = entries[i * dim + j];
                if i != j && x < -RATE_TOL * scale {
                    return Err(Error::Validation(format!(
                        "negative rate {x} at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
            let sum: f64 = (0..dim).map(|i| entries[i * dim + j]).sum();
            if sum.abs() > RATE_TOL * scale {
                return Err(Error::Validation(format!(
                    "rate matrix column {} sums to {sum}",
                    j + 1
                )));
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_real(self.dim, self.dim, &self.entries).expect("finite entries")
    }

    /// `e^{L t}` as a stochastic matrix.
    pub fn exp(&self, t: f64) -> Result<StochasticMatrix> {
        let e = expm(&self.to_complex().scale_real(t))?;
        let entries = e.real_parts();
        validate(entries, self.dim, 1e-9)
    }
}

/// Classical witness `T = e^{L t}` (or its closure limit).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalWitness {
    pub generator: RateMatrix,
    pub time: f64,
    /// `a + b = 1`: `T` is rank one and only reached as a limit; the
    /// generator reproduces it to within `e^{-CLOSURE_RATE}`.
    pub closure_point: bool,
}

/// Rate used for boundary witnesses; `e^{-40} ≈ 4e-18`.
pub const CLOSURE_RATE: f64 = 40.0;

/// Complete classical-embeddability test for `2×2` matrices: embeddable
/// iff `a + b ≥ 1`, the boundary being a closure point.
pub fn classical_embeddable_2x2(t: &StochasticMatrix) -> Result<Option<ClassicalWitness>> {
    if t.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            got: t.dim(),
            expected: "2".into(),
        });
    }
    let a = t.get(0, 0);
    let b = t.get(1, 1);
    let s = a + b - 1.0;
    if s < -CONDITION_SLACK {
        return Ok(None);
    }
    if s <= CONDITION_SLACK {
        // Rank one: T = π 1ᵀ with π = (a, 1 − a).
        let rates = [a - 1.0, a, 1.0 - a, -a];
        let generator = RateMatrix::new(rates.iter().map(|x| x * CLOSURE_RATE).collect(), 2)?;
        return Ok(Some(ClassicalWitness {
            generator,
            time: 1.0,
            closure_point: true,
        }));
    }
    // log T = (ln s / (s − 1)) (T − I); the ratio tends to 1 as s → 1.
    let factor = if (s - 1.0).abs() < 1e-8 {
        1.0 - (s - 1.0) / 2.0
    } else {
        s.ln() / (s - 1.0)
    };
    let rates = vec![
        factor * (a - 1.0),
        factor * (1.0 - b),
        factor * (1.0 - a),
        factor * (b - 1.0),
    ];
    Ok(Some(ClassicalWitness {
        generator: RateMatrix::new(rates, 2)?,
        time: 1.0,
        closure_point: false,
    }))
}
