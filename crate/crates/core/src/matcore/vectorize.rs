//! Tensor products and the row-wise vectorization used for superoperators.
//!
//! `vec(X)` stacks the rows of `X`, so `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Row-wise vectorization.
pub fn vec(x: &ComplexMatrix) -> Vec<C64> {
    x.data().to_vec()
}

pub fn unvec(v: &[C64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::new(rows, cols, v.to_vec())
}

/// Which tensor factor to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace of an operator on `C^{dim_a} ⊗ C^{dim_b}`.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    traced: Subsystem,
) -> Result<ComplexMatrix> {
    let n = m.require_square("partial trace argument")?;
    if n != dim_a * dim_b {
        return Err(Error::Dimension(format!(
            "operator of size {n} is not {dim_a}x{dim_b} bipartite"
        )));
    }
    Ok(match traced {
        Subsystem::Second => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Subsystem::First => ComplexMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    })
}

/// Applies a `d²×d²` superoperator to a `d×d` operator.
pub fn apply_superop(s: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = x.require_square("operator")?;
    if s.rows() != d * d || s.cols() != d * d {
        return Err(Error::Dimension(format!(
            "superoperator {}x{} cannot act on {d}x{d} operators",
            s.rows(),
            s.cols()
        )));
    }
    let out = s.apply(x.data());
    unvec(&out, d, d)
}

/// Row-wise `vec(I_d)`.
pub fn vec_identity(d: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(1.0, 0.0);
    }
    v
}
