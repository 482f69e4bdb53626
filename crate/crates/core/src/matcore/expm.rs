//! Matrix exponential by scaling and squaring around a degree-16 Taylor
//! kernel evaluated with the Paterson–Stockmeyer scheme.
//!
//! The input is scaled by `2^-s` until its 1-norm is at most 1/2. At that
//! norm the truncation error of the degree-16 series is below
//! `0.5^17 / 17! ≈ 2e-20`, so the result is limited by rounding in the
//! `s` squarings only.

use super::matrix::{ComplexMatrix, C64, ONE};
use crate::error::Result;

const TAYLOR_DEGREE: usize = 16;
const BLOCK: usize = 4;
const MAX_SCALED_NORM: f64 = 0.5;

fn taylor_coefficients() -> [f64; TAYLOR_DEGREE + 1] {
    let mut c = [1.0; TAYLOR_DEGREE + 1];
    for k in 1..=TAYLOR_DEGREE {
        c[k] = c[k - 1] / k as f64;
    }
    c
}

/// Number of halvings needed to bring `norm` under the kernel radius.
pub fn squaring_count(norm: f64) -> u32 {
    if norm <= MAX_SCALED_NORM {
        0
    } else {
        (norm / MAX_SCALED_NORM).log2().ceil().max(0.0) as u32
    }
}

/// `e^M` for a square complex matrix.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.require_square("expm argument")?;
    let norm = m.one_norm();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let s = squaring_count(norm);
    let scaled = m.scale_real((-(s as f64)).exp2());
    let mut result = taylor_kernel(&scaled);
    for _ in 0..s {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// `e^{M t}`; a convenience used throughout for semigroup evaluation.
pub fn expm_scaled(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    expm(&m.scale_real(t))
}

fn taylor_kernel(x: &ComplexMatrix) -> ComplexMatrix {
    let n = x.rows();
    let c = taylor_coefficients();
    // powers[k] = X^k for k = 0..=BLOCK
    let mut powers = Vec::with_capacity(BLOCK + 1);
    powers.push(ComplexMatrix::identity(n));
    powers.push(x.clone());
    for k in 2..=BLOCK {
        let next = powers[k - 1].matmul(x);
        powers.push(next);
    }
    let block_poly = |j: usize| -> ComplexMatrix {
        let mut b = ComplexMatrix::zeros(n, n);
        for (i, power) in powers.iter().take(BLOCK).enumerate() {
            let k = BLOCK * j + i;
            if k <= TAYLOR_DEGREE {
                b.add_scaled(power, C64::new(c[k], 0.0));
            }
        }
        b
    };
    let blocks = TAYLOR_DEGREE / BLOCK;
    // Horner in X^BLOCK, starting from the leading coefficient.
    let mut acc = powers[0].scale_real(c[TAYLOR_DEGREE]);
    if !TAYLOR_DEGREE.is_multiple_of(BLOCK) {
        acc = block_poly(blocks);
    }
    for j in (0..blocks).rev() {
        acc = powers[BLOCK].matmul(&acc);
        acc.add_scaled(&block_poly(j), ONE);
    }
    acc
}

/// `out = a · b` for row-major `n×n` slices.
fn mul_into(out: &mut [C64], a: &[C64], b: &[C64], n: usize) {
    out.fill(C64::new(0.0, 0.0));
    for i in 0..n {
        let row = &mut out[i * n..(i + 1) * n];
        for k in 0..n {
            let x = a[i * n + k];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for (o, &y) in row.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                *o += x * y;
            }
        }
    }
}

/// Reusable buffers for repeated exponentials of one size; same algorithm
/// as [`expm`] without per-call allocation.
#[derive(Debug, Clone)]
pub struct ExpmWorkspace {
    n: usize,
    powers: Vec<Vec<C64>>,
    acc: Vec<C64>,
    tmp: Vec<C64>,
}

impl ExpmWorkspace {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            powers: vec![vec![C64::new(0.0, 0.0); n * n]; BLOCK + 1],
            acc: vec![C64::new(0.0, 0.0); n * n],
            tmp: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Overwrites the row-major `n×n` matrix `m` with `e^m`.
    pub fn expm_in_place(&mut self, m: &mut [C64]) {
        let n = self.n;
        assert_eq!(m.len(), n * n, "workspace size mismatch");
        let norm = (0..n)
            .map(|j| (0..n).map(|i| m[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let c = taylor_coefficients();
        let s = squaring_count(norm);
        let scale = (-(s as f64)).exp2();

        let (first, rest) = self.powers.split_at_mut(1);
        let identity = &mut first[0];
        identity.fill(C64::new(0.0, 0.0));
        for i in 0..n {
            identity[i * n + i] = ONE;
        }
        for (dst, src) in rest[0].iter_mut().zip(m.iter()) {
            *dst = src * scale;
        }
        for k in 2..=BLOCK {
            let (lo, hi) = self.powers.split_at_mut(k);
            mul_into(&mut hi[0], &lo[k - 1], &lo[1], n);
        }

        let blocks = TAYLOR_DEGREE / BLOCK;
        for (a, p) in self.acc.iter_mut().zip(&self.powers[0]) {
            *a = p * c[TAYLOR_DEGREE];
        }
        for j in (0..blocks).rev() {
            mul_into(&mut self.tmp, &self.powers[BLOCK], &self.acc, n);
            std::mem::swap(&mut self.acc, &mut self.tmp);
            for i in 0..BLOCK {
                let coef = c[BLOCK * j + i];
                for (a, p) in self.acc.iter_mut().zip(&self.powers[i]) {
                    *a += p * coef;
                }
            }
        }
        for _ in 0..s {
            mul_into(&mut self.tmp, &self.acc, &self.acc, n);
            std::mem::swap(&mut self.acc, &mut self.tmp);
        }
        m.copy_from_slice(&self.acc);
    }
}

#[cfg(test)]
mod tests {
    use super::super::matrix::{pauli, I, ZERO};
    use super::*;

    /// Plain truncated power series; independent of the scaling path.
    fn power_series(m: &ComplexMatrix, order: usize) -> ComplexMatrix {
        let n = m.rows();
        let mut term = ComplexMatrix::identity(n);
        let mut sum = term.clone();
        for k in 1..=order {
            term = term.matmul(m).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        sum
    }

    #[test]
    fn zero_gives_identity_exactly() {
        let e = expm(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e, ComplexMatrix::identity(3));
    }

    #[test]
    fn diagonal_logs() {
        let m = ComplexMatrix::diag_real(&[2f64.ln(), 3f64.ln()]);
        let e = expm(&m).unwrap();
        assert!(e.max_abs_diff(&ComplexMatrix::diag_real(&[2.0, 3.0])) < 1e-13);
    }

    #[test]
    fn rotation_to_i_sigma_x() {
        let m = pauli::x().scale(I * std::f64::consts::FRAC_PI_2);
        let e = expm(&m).unwrap();
        let oracle = power_series(&m, 30);
        assert!(e.max_abs_diff(&pauli::x().scale(I)) < 1e-12);
        assert!(e.max_abs_diff(&oracle) < 1e-12);
    }

    #[test]
    fn matches_series_on_larger_norm() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.3, -1.0),
                C64::new(2.0, 0.5),
                C64::new(-1.5, 0.2),
                C64::new(0.1, 0.7),
            ],
        )
        .unwrap();
        let e = expm(&m).unwrap();
        let oracle = power_series(&m, 80);
        let rel = e.max_abs_diff(&oracle) / oracle.max_abs();
        assert!(rel < 1e-12, "rel {rel}");
    }

    #[test]
    fn rejects_rectangular() {
        let m = ComplexMatrix::new(1, 2, vec![ZERO, ZERO]).unwrap();
        assert!(expm(&m).is_err());
    }

    #[test]
    fn squaring_count_boundaries() {
        assert_eq!(squaring_count(0.5), 0);
        assert_eq!(squaring_count(0.51), 1);
        assert_eq!(squaring_count(4.0), 3);
    }

    #[test]
    fn workspace_matches_allocating_path() {
        let m = ComplexMatrix::from_fn(4, 4, |i, j| {
            C64::new((i as f64 - j as f64) * 0.7, (i * j) as f64 * 0.3 - 0.5)
        });
        let expected = expm(&m).unwrap();
        let mut ws = ExpmWorkspace::new(4);
        let mut buf = m.data().to_vec();
        ws.expm_in_place(&mut buf);
        let got = ComplexMatrix::new(4, 4, buf).unwrap();
        assert!(got.max_abs_diff(&expected) < 1e-12 * expected.max_abs());
        let mut zero = vec![ZERO; 4];
        ExpmWorkspace::new(2).expm_in_place(&mut zero);
        assert_eq!(zero, ComplexMatrix::identity(2).into_data());
    }
}
