use embedlab_core::lindblad::{
    build_generator, channel_at, channel_from_generator, classical_action, lift_classical,
    validate_gkls, GklsMode, Lindbladian,
};
use embedlab_core::matcore::{expm, C64};
use embedlab_core::optimizer::{decoded_action, objective, Parameterization};
use embedlab_core::sampling;
use embedlab_core::stochastic::{
    classify_extreme, theorem2_detect, ExtremeVerdict, RateMatrix, StochasticMatrix,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn images_strategy() -> impl Strategy<Value = Vec<usize>> {
    (1usize..=6).prop_flat_map(|d| prop::collection::vec(0..d, d))
}

fn permutation_of(d: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..d).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_ignores_relabeling(
        (images, perm) in images_strategy()
            .prop_flat_map(|im| { let d = im.len(); (Just(im), permutation_of(d)) })
    ) {
        let t = StochasticMatrix::from_images(&images).unwrap();
        let r = t.relabeled(&perm);
        prop_assert_eq!(
            classify_extreme(&t).unwrap().verdict,
            classify_extreme(&r).unwrap().verdict
        );
    }

    #[test]
    fn obstruction_matches_classification(images in images_strategy()) {
        let t = StochasticMatrix::from_images(&images).unwrap();
        let cert = theorem2_detect(&t).unwrap();
        let verdict = classify_extreme(&t).unwrap().verdict;
        prop_assert_eq!(cert.is_some(), verdict == ExtremeVerdict::NotEmbeddable);
        if let Some(c) = cert {
            prop_assert!(c.verify(&t));
        }
    }

    #[test]
    fn semigroup_law(seed in any::<u64>(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = sampling::random_lindbladian(&mut rng, 2, 1.0, 2, 0.7);
        let g = build_generator(&l);
        let a = channel_from_generator(&g, s).unwrap();
        let b = channel_from_generator(&g, t).unwrap();
        let ab = channel_from_generator(&g, s + t).unwrap();
        let composed = a.compose(&b).unwrap();
        prop_assert!(composed.matrix().max_abs_diff(ab.matrix()) < 1e-10);
    }

    #[test]
    fn random_generators_give_channels(seed in any::<u64>(), d in 2usize..=3, t in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = sampling::random_lindbladian(&mut rng, d, 1.0, 2, 0.5);
        prop_assert!(validate_gkls(&build_generator(&l), GklsMode::Generator).passed);
        let ch = channel_at(&l, t).unwrap();
        prop_assert!(validate_gkls(&ch, GklsMode::Channel).passed);
        prop_assert!(classical_action(&ch).is_ok());
    }

    #[test]
    fn lift_reproduces_rate_evolution(seed in any::<u64>(), d in 2usize..=4, t in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rates = sampling::random_rate_matrix(&mut rng, d, 2.0);
        let classical = rates.exp(t).unwrap();
        let quantum = classical_action(&channel_at(&lift_classical(&rates), t).unwrap()).unwrap();
        prop_assert!(classical.max_abs_diff(&quantum) < 1e-10);
    }

    #[test]
    fn evaluator_agrees_with_channel_path(params in prop::collection::vec(-2.0f64..2.0, 4)) {
        let p = Parameterization::ReducedQubit;
        let action = decoded_action(&params, p).unwrap();
        let t = StochasticMatrix::new(action, 2).unwrap();
        prop_assert!(objective(&t, &params, p).unwrap() < 1e-12);
    }
}

#[test]
fn expm_of_commuting_sum_factorizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let a = sampling::random_complex(&mut rng, 4, 4);
        let lhs = expm(&a.scale(C64::new(1.7, 0.0))).unwrap();
        let rhs = expm(&a).unwrap().matmul(&expm(&a.scale_real(0.7)).unwrap());
        assert!(lhs.max_abs_diff(&rhs) < 1e-9 * lhs.max_abs().max(1.0));
    }
}

#[test]
fn zero_rates_give_identity() {
    let l = lift_classical(&RateMatrix::zeros(3));
    assert_eq!(l, Lindbladian::zero(3));
    let t = classical_action(&channel_at(&l, 5.0).unwrap()).unwrap();
    assert!(t.max_abs_diff(&StochasticMatrix::identity(3)) < 1e-15);
}
