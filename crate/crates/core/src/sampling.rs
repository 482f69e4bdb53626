//! Random matrices and states for property tests and benchmarks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::lindblad::Lindbladian;
use crate::matcore::{ComplexMatrix, DensityMatrix, C64};
use crate::stochastic::RateMatrix;

pub fn normal_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Ginibre matrix: i.i.d. standard complex normal entries.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| normal_c64(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> ComplexMatrix {
    random_complex(rng, n, n).hermitian_part().scale_real(scale)
}

/// Haar-distributed unitary from Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_complex(rng, n, n);
    let mut q = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.column(k);
                let proj: C64 = qk.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(&qk) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= norm;
        }
        q.set_column(j, &v);
    }
    q
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| normal_c64(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Mixed state `G G† / Tr(G G†)` with a square Ginibre `G`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let g = random_complex(rng, n, n);
    DensityMatrix::renormalized(g.matmul(&g.adjoint())).expect("Wishart matrices are PSD")
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    DensityMatrix::pure(&random_unit_vector(rng, n)).expect("unit vector")
}

/// GKLS generator with a scaled random Hamiltonian and `kraus_count` Ginibre
/// jump operators.
pub fn random_lindbladian<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    hamiltonian_scale: f64,
    kraus_count: usize,
    kraus_scale: f64,
) -> Lindbladian {
    let h = random_hermitian(rng, d, hamiltonian_scale);
    let kraus = (0..kraus_count)
        .map(|_| random_complex(rng, d, d).scale_real(kraus_scale))
        .collect();
    Lindbladian::new(h, kraus).expect("random generator is well formed")
}

/// Rate matrix with off-diagonal rates uniform in `[0, max_rate)`.
pub fn random_rate_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize, max_rate: f64) -> RateMatrix {
    let mut e = vec![0.0; d * d];
    for j in 0..d {
        let mut out = 0.0;
        for i in (0..d).filter(|&i| i != j) {
            let r = rng.gen_range(0.0..max_rate);
            e[i * d + j] = r;
            out += r;
        }
        e[j * d + j] = -out;
    }
    RateMatrix::new(e, d).expect("columns sum to zero")
}
