use mgs::somat::{eval_product, GateKind, GeneratorId, TransferMatrix};
use mgs::spinrep::{covariance, apply_to_zero, gen_gates, transfer_matrix, DenseUnitary, DEFAULT_QUBIT_CAP};
use mgs::Circuit;
use proptest::prelude::*;

fn word(n: usize, max_len: usize) -> impl Strategy<Value = Vec<GeneratorId>> {
    let gens = GeneratorId::all(n);
    prop::collection::vec(prop::sample::select(gens), 0..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_product_matches_simulator((n, w) in (1usize..=5).prop_flat_map(|n| (Just(n), word(n, 30)))) {
        let exact = eval_product(n, &w).unwrap();
        let u = DenseUnitary::from_gates(n, &gen_gates(&w), DEFAULT_QUBIT_CAP).unwrap();
        let q = transfer_matrix(&u).unwrap();
        prop_assert!((q - exact.to_float().unwrap()).abs().max() <= 1e-9);
    }

    #[test]
    fn products_stay_special_orthogonal((n, w) in (1usize..=3).prop_flat_map(|n| (Just(n), word(n, 20)))) {
        let q = eval_product(n, &w).unwrap();
        prop_assert!(q.is_special_orthogonal());
        let t = w.iter().filter(|g| g.is_t()).count() as u32;
        prop_assert!(q.k_max() <= t);
    }

    #[test]
    fn inverse_word_undoes((n, w) in (1usize..=3).prop_flat_map(|n| (Just(n), word(n, 20)))) {
        let mut all = w.clone();
        all.extend(w.iter().rev().map(|g| g.inverse()));
        prop_assert!(eval_product(n, &all).unwrap().is_identity());
        let c = Circuit::from_gates(n, &w);
        prop_assert!(c.inverse().eval().unwrap().matmul(&c.eval().unwrap()).unwrap().is_identity());
    }

    #[test]
    fn covariance_transforms_by_conjugation((n, w) in (1usize..=3).prop_flat_map(|n| (Just(n), word(n, 12)))) {
        let q = eval_product(n, &w).unwrap();
        let u = DenseUnitary::from_gates(n, &gen_gates(&w), DEFAULT_QUBIT_CAP).unwrap();
        let g = covariance(n, &apply_to_zero(&u));
        let g0 = mgs::satenc::vacuum_covariance(n);
        let want = q.matmul(&g0).unwrap().matmul(&q.transpose()).unwrap().to_float().unwrap();
        prop_assert!((g - want).abs().max() <= 1e-9);
    }
}

#[test]
fn double_cover_sign() {
    let s4 = vec![GeneratorId::new(GateKind::Stil, 1); 4];
    let u = DenseUnitary::from_gates(1, &gen_gates(&s4), DEFAULT_QUBIT_CAP).unwrap();
    let sum = &u.m + &DenseUnitary::identity(1).m;
    assert!(sum.iter().all(|z| z.norm() < 1e-12));
    assert!(eval_product(1, &s4).unwrap().is_identity());
}

#[test]
fn generator_blocks() {
    let t = TransferMatrix::generator(1, GeneratorId::new(GateKind::Ttil, 1)).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let f = t.to_float().unwrap();
    assert!((f[(0, 0)] - h).abs() < 1e-15 && (f[(0, 1)] - h).abs() < 1e-15 && (f[(1, 0)] + h).abs() < 1e-15);
    let tt = eval_product(1, &[GeneratorId::new(GateKind::Ttil, 1); 2]).unwrap();
    assert_eq!(tt, TransferMatrix::generator(1, GeneratorId::new(GateKind::Stil, 1)).unwrap());
    assert!(TransferMatrix::generator(2, GeneratorId::new(GateKind::Rtil, 2)).is_err());
}
