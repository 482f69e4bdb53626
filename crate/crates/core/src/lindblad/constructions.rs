//! Explicit generators: classical lifts, unitary logarithms, and the
//! strong-coupling construction that copies columns of an embedded block.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI, SQRT_2};

use super::Lindbladian;
use crate::error::{Error, Result};
use crate::matcore::{eig_hermitian, ComplexMatrix, C64};
use crate::stochastic::RateMatrix;

pub const DEFAULT_GAMMA: f64 = 1e3;
pub const DEFAULT_FINAL_TIME: f64 = 1.0;

const UNITARY_TOL: f64 = 1e-10;
const BLOCK_TOL: f64 = 1e-12;

/// `H = 0`, Kraus operators `√L_ij |i⟩⟨j|` for every positive off-diagonal rate.
pub fn lift_classical(rates: &RateMatrix) -> Lindbladian {
    let d = rates.dim();
    let mut kraus = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let r = rates.get(i, j);
            if i != j && r > 0.0 {
                kraus.push(ComplexMatrix::unit(d, i, j).scale_real(r.sqrt()));
            }
        }
    }
    Lindbladian::new(ComplexMatrix::zeros(d, d), kraus).expect("lift is well formed")
}

/// Hamiltonian with `e^{−iH} = U`, using the principal logarithm. An
/// eigenphase of exactly `−π` is mapped to `+π`.
pub fn hamiltonian_from_unitary(u: &ComplexMatrix) -> Result<Lindbladian> {
    let d = u.require_square("unitary")?;
    let defect = (&u.adjoint().matmul(u) - &ComplexMatrix::identity(d)).max_abs();
    if defect.is_nan() || defect > UNITARY_TOL {
        return Err(Error::Contract(format!(
            "matrix is not unitary (‖U†U − I‖ = {defect:.3e})"
        )));
    }
    let ud = u.adjoint();
    let re = (u + &ud).scale_real(0.5);
    let im = (u - &ud).scale(C64::new(0.0, -0.5));
    // A normal matrix shares eigenvectors with any real combination of its
    // Hermitian and anti-Hermitian parts; generic weights split degeneracies.
    for weight in [0.618_033_988_749_894_9, SQRT_2, E / 10.0, 3.0] {
        let k = &re + &im.scale_real(weight);
        let eig = eig_hermitian(&k.hermitian_part())?;
        let v = &eig.vectors;
        let diag = v.adjoint().matmul(u).matmul(v);
        let off = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| diag[(i, j)].norm())
            .fold(0.0, f64::max);
        if off > 1e-9 {
            continue;
        }
        let phases: Vec<f64> = (0..d)
            .map(|k| {
                let theta = diag[(k, k)].arg();
                if theta <= -PI {
                    PI
                } else {
                    theta
                }
            })
            .collect();
        let neg: Vec<f64> = phases.iter().map(|p| -p).collect();
        let h = v.matmul(&ComplexMatrix::diag_real(&neg)).matmul(&v.adjoint());
        return Lindbladian::hamiltonian_only(h.hermitian_part());
    }
    Err(Error::Contract(
        "could not diagonalize the unitary to the required accuracy".into(),
    ))
}

/// Adds strong decay `√γ |i_j⟩⟨j|` from each copied level `j` to the level
/// `i_j` of the block on which `block` acts. Keys of `column_map` must be
/// exactly the levels outside the block, which are the last ones.
pub fn theorem3_generator(
    block: &Lindbladian,
    column_map: &BTreeMap<usize, usize>,
    gamma: f64,
) -> Result<Lindbladian> {
    let d = block.dim();
    if column_map.len() > d {
        return Err(Error::Validation("column map larger than dimension".into()));
    }
    let inner = d - column_map.len();
    if let Some((&j, _)) = column_map.iter().find(|(&j, _)| j < inner || j >= d) {
        return Err(Error::Validation(format!(
            "column map key {} must lie in {}..={}",
            j + 1,
            inner + 1,
            d
        )));
    }
    if let Some((&j, &i)) = column_map.iter().find(|(_, &i)| i >= inner) {
        return Err(Error::Validation(format!(
            "column {} mapped to {}, outside the block 1..={inner}",
            j + 1,
            i + 1
        )));
    }
    if column_map.is_empty() {
        return Ok(block.clone());
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Domain(format!("coupling must be positive, got {gamma}")));
    }
    let outside = |m: &ComplexMatrix| {
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|&(i, j)| i >= inner || j >= inner)
            .map(|(i, j)| m[(i, j)].norm())
            .fold(0.0, f64::max)
    };
    if outside(block.hamiltonian()) > BLOCK_TOL
        || block.kraus_ops().iter().any(|a| outside(a) > BLOCK_TOL)
    {
        return Err(Error::Validation(format!(
            "block generator must act only on levels 1..={inner}"
        )));
    }
    let mut kraus = block.kraus_ops().to_vec();
    let amp = gamma.sqrt();
    for (&j, &i) in column_map {
        kraus.push(ComplexMatrix::unit(d, i, j).scale_real(amp));
    }
    Lindbladian::new(block.hamiltonian().clone(), kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{channel_at, classical_action};
    use crate::matcore::{expm, pauli, I};
    use crate::sampling;
    use crate::stochastic::{classical_embeddable_2x2, StochasticMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn action(l: &Lindbladian, t: f64) -> StochasticMatrix {
        classical_action(&channel_at(l, t).unwrap()).unwrap()
    }

    #[test]
    fn zero_rates_give_identity_dynamics() {
        let l = lift_classical(&RateMatrix::zeros(3));
        assert!(l.kraus_ops().is_empty());
        assert_eq!(action(&l, 2.0), StochasticMatrix::identity(3));
    }

    #[test]
    fn lift_reproduces_kingman_witness() {
        let t = StochasticMatrix::two_by_two(0.7, 0.8).unwrap();
        let w = classical_embeddable_2x2(&t).unwrap().unwrap();
        let got = action(&lift_classical(&w.generator), w.time);
        assert!(got.max_abs_diff(&t) < 1e-9);
    }

    #[test]
    fn cyclic_rates_converge_to_uniform() {
        #[rustfmt::skip]
        let rates = RateMatrix::new(vec![
            -1.0, 0.0, 1.0,
            1.0, -1.0, 0.0,
            0.0, 1.0, -1.0,
        ], 3).unwrap();
        let t = action(&lift_classical(&rates), 20.0);
        for &x in t.entries() {
            assert!((x - 1.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn lift_commutes_with_classical_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for d in 2..=4 {
            for _ in 0..5 {
                let rates = sampling::random_rate_matrix(&mut rng, d, 2.0);
                let t = rng.gen_range(0.05..3.0);
                let got = action(&lift_classical(&rates), t);
                assert!(got.max_abs_diff(&rates.exp(t).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn identity_unitary_has_zero_hamiltonian() {
        let l = hamiltonian_from_unitary(&ComplexMatrix::identity(3)).unwrap();
        assert!(l.hamiltonian().max_abs() < 1e-14);
    }

    #[test]
    fn sigma_x_gives_swap() {
        let l = hamiltonian_from_unitary(&pauli::x()).unwrap();
        let t = action(&l, 1.0);
        assert!(t.max_abs_diff(&StochasticMatrix::from_images(&[1, 0]).unwrap()) < 1e-9);
    }

    #[test]
    fn cyclic_permutation_unitary() {
        let p = StochasticMatrix::from_images(&[1, 2, 0]).unwrap();
        let l = hamiltonian_from_unitary(&p.to_complex()).unwrap();
        assert!(action(&l, 1.0).max_abs_diff(&p) < 1e-9);
    }

    #[test]
    fn unitary_log_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for d in 1..=4 {
            for _ in 0..5 {
                let u = sampling::random_unitary(&mut rng, d);
                let h = hamiltonian_from_unitary(&u).unwrap();
                let back = expm(&h.hamiltonian().scale(-I)).unwrap();
                assert!(back.max_abs_diff(&u) < 1e-9);
            }
        }
    }

    #[test]
    fn phase_minus_one_maps_to_plus_pi() {
        let u = ComplexMatrix::identity(2).scale_real(-1.0);
        let h = hamiltonian_from_unitary(&u).unwrap();
        assert!((h.hamiltonian()[(0, 0)].re + PI).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = ComplexMatrix::identity(2).scale_real(1.1);
        assert!(matches!(hamiltonian_from_unitary(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn empty_map_is_identity_operation() {
        let l = lift_classical(&RateMatrix::new(vec![-1.0, 2.0, 1.0, -2.0], 2).unwrap());
        assert_eq!(theorem3_generator(&l, &BTreeMap::new(), 5.0).unwrap(), l);
    }

    #[test]
    fn identity_block_copy_shrinks_with_gamma() {
        #[rustfmt::skip]
        let target = StochasticMatrix::new(vec![
            1.0, 0.0, 1.0,
            0.0, 1.0, 0.0,
            0.0, 0.0, 0.0,
        ], 3).unwrap();
        let map = BTreeMap::from([(2, 0)]);
        let errs: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&g| {
                let l = theorem3_generator(&Lindbladian::zero(3), &map, g).unwrap();
                action(&l, DEFAULT_FINAL_TIME).max_abs_diff(&target)
            })
            .collect();
        assert!(errs[1] <= 1e-2);
        // Already at rounding level here; only require no growth beyond it.
        assert!(errs[1] <= errs[0] + 1e-12 && errs[2] <= errs[1] + 1e-12, "{errs:?}");
    }

    #[test]
    fn kingman_block_copy_approaches_column() {
        let r = StochasticMatrix::two_by_two(0.7, 0.8).unwrap();
        let w = classical_embeddable_2x2(&r).unwrap().unwrap();
        // Scale rates so the witness time equals the final time.
        let scaled: Vec<f64> = w.generator.entries().iter().map(|x| x * w.time).collect();
        let block = lift_classical(&RateMatrix::new(scaled, 2).unwrap())
            .embedded(3, &[0, 1])
            .unwrap();
        let map = BTreeMap::from([(2, 1)]);
        let dev = |g: f64| {
            let t = action(&theorem3_generator(&block, &map, g).unwrap(), 1.0);
            (0..3)
                .map(|i| (t.get(i, 2) - t.get(i, 1)).abs())
                .fold(0.0, f64::max)
        };
        let (lo, mid, hi) = (dev(1e2), dev(1e3), dev(1e4));
        assert!(mid < 1e-2, "{mid}");
        assert!(lo > mid && mid > hi, "{lo} {mid} {hi}");
    }

    #[test]
    fn map_validation() {
        let l = Lindbladian::zero(3);
        assert!(matches!(
            theorem3_generator(&l, &BTreeMap::from([(1, 0)]), 1.0),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            theorem3_generator(&l, &BTreeMap::from([(2, 2)]), 1.0),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            theorem3_generator(&l, &BTreeMap::from([(2, 0)]), -1.0),
            Err(Error::Domain(_))
        ));
        let leaky = Lindbladian::new(
            ComplexMatrix::zeros(3, 3),
            vec![ComplexMatrix::unit(3, 2, 0)],
        )
        .unwrap();
        assert!(theorem3_generator(&leaky, &BTreeMap::from([(2, 0)]), 1.0).is_err());
    }
}
