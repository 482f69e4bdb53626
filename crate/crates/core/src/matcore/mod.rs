//! Dense complex linear algebra kernel: exponentials, Hermitian spectra,
//! row-wise vectorization and state measures.

mod density;
mod eigen;
mod expm;
mod matrix;
mod measures;
mod vectorize;

pub use density::{hs_inner, DensityMatrix};
pub use eigen::{eig_hermitian, operator_norm, HermitianEigen};
pub use expm::{expm, expm_scaled, squaring_count, ExpmWorkspace};
pub use matrix::{pauli, ComplexMatrix, C64, I, ONE, ZERO};
pub use measures::{concurrence_2xn, fidelity, mixedness, overlap, trace_distance};
pub use vectorize::{apply_superop, kron, partial_trace, unvec, vec, vec_identity, Subsystem};
