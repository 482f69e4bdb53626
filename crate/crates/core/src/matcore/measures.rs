//! Distances and entanglement measures on states.

use super::density::{hs_inner, DensityMatrix};
use super::eigen::eig_hermitian;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Normalization tolerance for 2×N coefficient arrays.
pub const NORM_TOL: f64 = 1e-12;

fn same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() == sigma.dim() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )))
    }
}

/// `½‖ρ − σ‖₁`
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    let e = eig_hermitian(&diff)?;
    let d = 0.5 * e.values.iter().map(|x| x.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

/// Eigenvalues of a density matrix below this multiple of the largest are
/// roundoff and dropped before taking square roots.
const SUPPORT_CUTOFF: f64 = 64.0 * f64::EPSILON;

fn sqrt_on_support(rho: &DensityMatrix) -> ComplexMatrix {
    let e = rho.eigen();
    let cutoff = SUPPORT_CUTOFF * e.max_value().max(0.0);
    e.map(|x| if x > cutoff { x.sqrt() } else { 0.0 })
}

fn column_norm_sqr(m: &[C64], n: usize, j: usize) -> f64 {
    (0..n).map(|i| m[i * n + j].norm_sqr()).sum()
}

/// Singular values of a square matrix by one-sided Jacobi rotations. The
/// absolute error is of order `ε‖m‖`, also for the zero singular values.
fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut a = m.data().to_vec();
    for _ in 0..64 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = column_norm_sqr(&a, n, p);
                let beta = column_norm_sqr(&a, n, q);
                let gamma: C64 = (0..n).map(|i| a[i * n + p].conj() * a[i * n + q]).sum();
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // Rephase column q so that the overlap is real and positive.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let x = a[i * n + p];
                    let y = a[i * n + q] * phase;
                    a[i * n + p] = x * c - y * s;
                    a[i * n + q] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (0..n).map(|j| column_norm_sqr(&a, n, j).sqrt()).collect()
}

/// Uhlmann fidelity `(Tr|√ρ √σ|)²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let product = sqrt_on_support(rho).matmul(&sqrt_on_support(sigma));
    let trace_norm: f64 = singular_values(&product).iter().sum();
    Ok((trace_norm * trace_norm).clamp(0.0, 1.0))
}

/// `M(ρ) = √(1 − Tr ρ²)`
pub fn mixedness(rho: &DensityMatrix) -> f64 {
    rho.mixedness()
}

/// `Tr(ρσ)`
pub fn overlap(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    Ok(hs_inner(rho.matrix(), sigma.matrix()))
}

/// Concurrence of a normalized 2×N pure state with coefficients `f[i][j]`:
/// `2 √(Σ_{j<k} |f_{0j} f_{1k} − f_{1j} f_{0k}|²)`.
pub fn concurrence_2xn(f: &ComplexMatrix) -> Result<f64> {
    if f.rows() != 2 {
        return Err(Error::Dimension(format!(
            "expected 2xN coefficients, got {}x{}",
            f.rows(),
            f.cols()
        )));
    }
    let norm = f.frobenius_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Contract(format!(
            "state coefficients have norm {norm}, expected 1"
        )));
    }
    let n = f.cols();
    let mut sum = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            sum += (f[(0, j)] * f[(1, k)] - f[(1, j)] * f[(0, k)]).norm_sqr();
        }
    }
    Ok((2.0 * sum.sqrt()).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::super::matrix::ZERO;
    use super::*;

    #[test]
    fn trace_distance_examples() {
        let z0 = DensityMatrix::basis(2, 0);
        let z1 = DensityMatrix::basis(2, 1);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(trace_distance(&z0, &z0).unwrap(), 0.0);
        assert!((trace_distance(&z0, &z1).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&z0, &mixed).unwrap() - 0.5).abs() < 1e-15);
        let other = DensityMatrix::basis(3, 0);
        assert!(matches!(
            trace_distance(&z0, &other),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn fidelity_examples() {
        let z0 = DensityMatrix::basis(2, 0);
        let z1 = DensityMatrix::basis(2, 1);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((fidelity(&z0, &z0).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity(&z0, &z1).unwrap().abs() < 1e-14);
        assert!((fidelity(&z0, &mixed).unwrap() - 0.5).abs() < 1e-14);
        assert!(fidelity(&z0, &DensityMatrix::basis(3, 0)).is_err());
    }

    #[test]
    fn pure_state_fidelity_is_overlap() {
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.48), C64::new(0.64, 0.0)];
        let phi = [C64::new(0.0, 0.8), C64::new(0.36, 0.0), C64::new(0.0, 0.48)];
        let overlap: C64 = psi.iter().zip(&phi).map(|(a, b)| a.conj() * b).sum();
        let f = fidelity(
            &DensityMatrix::pure(&psi).unwrap(),
            &DensityMatrix::pure(&phi).unwrap(),
        )
        .unwrap();
        assert!((f - overlap.norm_sqr()).abs() < 1e-14, "{f}");
    }

    #[test]
    fn singular_values_of_known_matrix() {
        // diag(3, 1) rotated on both sides keeps its singular values
        let u = ComplexMatrix::from_real(2, 2, &[0.6, -0.8, 0.8, 0.6]).unwrap();
        let m = u.matmul(&ComplexMatrix::diag_real(&[3.0, 1.0])).matmul(&u.adjoint());
        let mut sv = singular_values(&m);
        sv.sort_by(f64::total_cmp);
        assert!((sv[0] - 1.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
        let rank_one = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        let sv = singular_values(&rank_one);
        assert!(sv.iter().any(|s| s.abs() < 1e-15));
    }

    #[test]
    fn concurrence_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexMatrix::new(
            2,
            2,
            vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)],
        )
        .unwrap();
        assert!((concurrence_2xn(&bell).unwrap() - 1.0).abs() < 1e-15);
        // product a ⊗ b
        let a = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let b = [C64::new(0.5, 0.0), C64::new(0.5, 0.5), C64::new(0.5, 0.0)];
        let bn = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let prod = ComplexMatrix::from_fn(2, 3, |i, j| a[i] * b[j] / bn);
        assert!(concurrence_2xn(&prod).unwrap() < 1e-15);
        let unnormalized = bell.scale_real(2.0);
        assert!(matches!(
            concurrence_2xn(&unnormalized),
            Err(Error::Contract(_))
        ));
    }
}
