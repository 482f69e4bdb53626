use super::eigen::{eig_hermitian, HermitianEigen};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const MIN_EIGENVALUE: f64 = -1e-10;

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.require_square("density matrix")?;
        let herr = matrix.hermiticity_error();
        if herr > HERMITIAN_TOL {
            return Err(Error::Contract(format!(
                "density matrix not Hermitian (deviation {herr:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Contract(format!("density matrix trace {tr}")));
        }
        let min = eig_hermitian(&matrix)?.min_value();
        if min < MIN_EIGENVALUE {
            return Err(Error::Contract(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Hermitizes and rescales to unit trace before validating. Meant for
    /// states produced by numerically evolving a valid state.
    pub fn renormalized(matrix: ComplexMatrix) -> Result<Self> {
        let h = matrix.hermitian_part();
        let tr = h.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::Contract(format!("cannot renormalize trace {tr}")));
        }
        Self::new(h.scale_real(1.0 / tr))
    }

    /// `|ψ⟩⟨ψ|` for a nonzero vector (normalized here).
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Contract("pure state vector must be nonzero".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::renormalized(ComplexMatrix::outer(&v, &v))
    }

    /// `|i⟩⟨i|` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Self {
        Self {
            matrix: ComplexMatrix::unit(d, i, i),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> HermitianEigen {
        eig_hermitian(&self.matrix).expect("density matrices are Hermitian")
    }

    /// Largest eigenvalue; `1 − λ_max` is the trace distance to the nearest pure state.
    pub fn max_eigenvalue(&self) -> f64 {
        self.eigen().max_value()
    }

    /// Eigenvector of the largest eigenvalue as a pure state.
    pub fn top_pure_state(&self) -> DensityMatrix {
        let e = self.eigen();
        let v = e.vector(e.values.len() - 1);
        DensityMatrix::pure(&v).expect("eigenvectors are unit vectors")
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        hs_inner(&self.matrix, &self.matrix)
    }

    /// `M(ρ) = √(1 − Tr ρ²)`
    pub fn mixedness(&self) -> f64 {
        (1.0 - self.purity()).max(0.0).sqrt()
    }
}

/// Real part of `Tr(A B)` for Hermitian arguments.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s.re
}
