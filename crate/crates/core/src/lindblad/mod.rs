//! GKLS generators, the channels they generate, and their classical action.
//!
//! A generator is stored as a Hamiltonian plus a Kraus list for the
//! completely positive part, `Φ(ρ) = Σ_k A_k ρ A_k†`, so that
//!
//! ```text
//! 𝓛(ρ) = −i[H, ρ] + Σ_k A_k ρ A_k† − ½ {Σ_k A_k†A_k, ρ}
//! ```
//!
//! Superoperators act on row-vectorized operators.

mod constructions;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{
    eig_hermitian, expm_scaled, kron, vec_identity, ComplexMatrix, DensityMatrix, C64, I,
};
use crate::stochastic::{validate, StochasticMatrix};

pub use constructions::{
    hamiltonian_from_unitary, lift_classical, theorem3_generator, DEFAULT_GAMMA, DEFAULT_FINAL_TIME,
};

pub const HAMILTONIAN_TOL: f64 = 1e-10;
pub const GENERATOR_TOL: f64 = 1e-10;
pub const CHANNEL_TOL: f64 = 1e-9;
/// Step used to probe conditional complete positivity of a generator.
pub const CP_PROBE_TIME: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Lindbladian {
    dim: usize,
    hamiltonian: ComplexMatrix,
    kraus_ops: Vec<ComplexMatrix>,
}

impl Lindbladian {
    pub fn new(hamiltonian: ComplexMatrix, kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = hamiltonian.require_square("Hamiltonian")?;
        if !hamiltonian.is_finite() {
            return Err(Error::Contract("Hamiltonian has non-finite entries".into()));
        }
        let scale = hamiltonian.max_abs().max(1.0);
        let herr = hamiltonian.hermiticity_error();
        if herr > HAMILTONIAN_TOL * scale {
            return Err(Error::Contract(format!(
                "Hamiltonian is not Hermitian (deviation {herr:.3e})"
            )));
        }
        for (k, a) in kraus_ops.iter().enumerate() {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::Dimension(format!(
                    "Kraus operator {k} is {}x{}, expected {dim}x{dim}",
                    a.rows(),
                    a.cols()
                )));
            }
            if !a.is_finite() {
                return Err(Error::Contract(format!("Kraus operator {k} is not finite")));
            }
        }
        Ok(Self {
            dim,
            hamiltonian,
            kraus_ops,
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            hamiltonian: ComplexMatrix::zeros(dim, dim),
            kraus_ops: Vec::new(),
        }
    }

    pub fn hamiltonian_only(hamiltonian: ComplexMatrix) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// `Φ*(𝟙) = Σ_k A_k† A_k`
    pub fn dissipator_weight(&self) -> ComplexMatrix {
        let mut w = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus_ops {
            w = &w + &a.adjoint().matmul(a);
        }
        w
    }

    /// Embeds into dimension `dim`, sending level `k` to `levels[k]`.
    pub fn embedded(&self, dim: usize, levels: &[usize]) -> Result<Self> {
        if levels.len() != self.dim || levels.iter().any(|&l| l >= dim) {
            return Err(Error::Dimension(format!(
                "cannot place {} levels into dimension {dim}",
                self.dim
            )));
        }
        let mut sorted = levels.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != levels.len() {
            return Err(Error::Validation("embedding levels must be distinct".into()));
        }
        let lift = |m: &ComplexMatrix| {
            let mut out = ComplexMatrix::zeros(dim, dim);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    out[(levels[i], levels[j])] = m[(i, j)];
                }
            }
            out
        };
        Ok(Self {
            dim,
            hamiltonian: lift(&self.hamiltonian),
            kraus_ops: self.kraus_ops.iter().map(lift).collect(),
        })
    }

    /// Relabels basis states: level `i` becomes `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        self.embedded(self.dim, perm)
    }

    /// `e^{𝓛t}` applied to a state, renormalized against rounding.
    pub fn evolve(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        let channel = channel_at(self, t)?;
        channel.apply_state(rho)
    }
}

/// `d²×d²` matrix acting on row-vectorized `d×d` operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != dim * dim || matrix.cols() != dim * dim {
            return Err(Error::Dimension(format!(
                "superoperator on {dim}x{dim} operators must be {0}x{0}, got {1}x{2}",
                dim * dim,
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim * dim),
        }
    }

    /// `X ↦ U X U†`
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        let d = u.require_square("unitary")?;
        Ok(Self {
            dim: d,
            matrix: kron(u, &u.conj()),
        })
    }

    /// `X ↦ Σ_k A_k X A_k†`
    pub fn from_kraus(dim: usize, kraus: &[ComplexMatrix]) -> Self {
        let mut m = ComplexMatrix::zeros(dim * dim, dim * dim);
        for a in kraus {
            m = &m + &kron(a, &a.conj());
        }
        Self { dim, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        crate::matcore::apply_superop(&self.matrix, x)
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::renormalized(self.apply(rho.matrix())?)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Self::new(self.dim, self.matrix.try_matmul(&other.matrix)?)
    }

    /// Choi matrix `J = Σ_ij Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|`, so that
    /// `Φ(ρ) = Tr₂[J (I ⊗ ρᵀ)]`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        ComplexMatrix::from_fn(d * d, d * d, |r, c| {
            let (a, i) = (r / d, r % d);
            let (b, j) = (c / d, c % d);
            self.matrix[(a * d + b, i * d + j)]
        })
    }

    /// `max_X |Tr 𝓔(X) − Tr X|` over matrix units.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = self.dim;
        let id = vec_identity(d);
        (0..d * d)
            .map(|c| {
                let s: C64 = (0..d * d).map(|r| id[r] * self.matrix[(r, c)]).sum();
                (s - id[c]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `Tr 𝓛(X)` from zero (generator reading).
    pub fn trace_annihilation_error(&self) -> f64 {
        let d = self.dim;
        let id = vec_identity(d);
        (0..d * d)
            .map(|c| {
                (0..d * d)
                    .map(|r| id[r] * self.matrix[(r, c)])
                    .sum::<C64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        let j = self.choi().hermitian_part();
        eig_hermitian(&j).map(|e| e.min_value()).unwrap_or(f64::NEG_INFINITY)
    }
}

/// `L̂ = −i(H⊗I − I⊗Hᵀ) + Σ_k A_k⊗Ā_k − ½ Σ_k (A_k†A_k ⊗ I + I ⊗ (A_k†A_k)ᵀ)`
pub fn build_generator(l: &Lindbladian) -> Superoperator {
    let d = l.dim;
    let id = ComplexMatrix::identity(d);
    let h = &l.hamiltonian;
    let mut m = (&kron(h, &id) - &kron(&id, &h.transpose())).scale(-I);
    let mut weight = ComplexMatrix::zeros(d, d);
    for a in &l.kraus_ops {
        m = &m + &kron(a, &a.conj());
        weight = &weight + &a.adjoint().matmul(a);
    }
    if !l.kraus_ops.is_empty() {
        let anti = &kron(&weight, &id) + &kron(&id, &weight.transpose());
        m.add_scaled(&anti, C64::new(-0.5, 0.0));
    }
    Superoperator { dim: d, matrix: m }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GklsMode {
    Generator,
    Channel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GklsReport {
    pub mode: GklsMode,
    pub passed: bool,
    /// Generator: `max |Tr 𝓛(X)|`; channel: `max |Tr 𝓔(X) − Tr X|`.
    pub trace_error: f64,
    /// Minimum Choi eigenvalue (of `e^{L̂·1e-6}` in generator mode).
    pub min_choi_eigenvalue: f64,
    pub failures: Vec<String>,
}

/// Checks a superoperator as a GKLS generator or as a CPTP channel.
pub fn validate_gkls(s: &Superoperator, mode: GklsMode) -> GklsReport {
    let mut failures = Vec::new();
    let scale = s.matrix.max_abs().max(1.0);
    let (trace_error, min_choi) = match mode {
        GklsMode::Generator => {
            let te = s.trace_annihilation_error();
            if te > GENERATOR_TOL * scale {
                failures.push(format!("generator does not annihilate the trace ({te:.3e})"));
            }
            let probe = expm_scaled(&s.matrix, CP_PROBE_TIME)
                .map(|m| Superoperator { dim: s.dim, matrix: m }.min_choi_eigenvalue())
                .unwrap_or(f64::NEG_INFINITY);
            (te, probe)
        }
        GklsMode::Channel => {
            let te = s.trace_preservation_error();
            if te > CHANNEL_TOL * scale {
                failures.push(format!("channel is not trace preserving ({te:.3e})"));
            }
            (te, s.min_choi_eigenvalue())
        }
    };
    if min_choi < -CHANNEL_TOL {
        failures.push(format!(
            "Choi matrix has negative eigenvalue {min_choi:.3e}"
        ));
    }
    GklsReport {
        mode,
        passed: failures.is_empty(),
        trace_error,
        min_choi_eigenvalue: min_choi,
        failures,
    }
}

/// `e^{L̂ t}`
pub fn channel_at(l: &Lindbladian, t: f64) -> Result<Superoperator> {
    channel_from_generator(&build_generator(l), t)
}

pub fn channel_from_generator(generator: &Superoperator, t: f64) -> Result<Superoperator> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("evolution time must be ≥ 0, got {t}")));
    }
    Ok(Superoperator {
        dim: generator.dim,
        matrix: expm_scaled(&generator.matrix, t)?,
    })
}

/// `T_ij = ⟨i|𝓔(|j⟩⟨j|)|i⟩` without channel validation.
pub fn classical_action_entries(s: &Superoperator) -> Vec<f64> {
    let d = s.dim;
    let mut t = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            t[i * d + j] = s.matrix[(i * d + i, j * d + j)].re;
        }
    }
    t
}

/// Classical action of a validated channel.
pub fn classical_action(s: &Superoperator) -> Result<StochasticMatrix> {
    let report = validate_gkls(s, GklsMode::Channel);
    if !report.passed {
        return Err(Error::Contract(format!(
            "not a channel: {}",
            report.failures.join("; ")
        )));
    }
    validate(classical_action_entries(s), s.dim, CHANNEL_TOL)
}
