//! Quantum embeddability of stochastic matrices.
//!
//! A column-stochastic matrix `T` is quantum-embeddable when it is (up to
//! arbitrary precision) the classical action `T_ij = ⟨i|e^{𝓛t}(|j⟩⟨j|)|i⟩`
//! of a channel generated by a time-independent GKLS generator `𝓛`. This
//! crate provides the linear algebra kernel, the classical side (validation,
//! extreme matrices, structural obstructions), generators and channels,
//! analytic certificates, and a multistart Nelder–Mead search.

pub mod certify;
pub mod error;
pub mod lindblad;
pub mod matcore;
pub mod optimizer;
pub mod sampling;
pub mod stochastic;

pub use error::{Error, Result};
