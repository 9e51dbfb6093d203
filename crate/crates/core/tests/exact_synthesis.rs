use mgs::exact::{gate_count_bounds, synthesize, t_depth_lower_bound};
use mgs::somat::{GeneratorId, TransferMatrix};
use mgs::targets::{random_ring_target, xx_target};
use mgs::{Error, RingScalar};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn roundtrip_and_bounds(n in 1usize..=4, t in 0usize..=8, seed in any::<u64>()) {
        let q = random_ring_target(n, t, seed);
        let rep = synthesize(&q).unwrap();
        let c = &rep.circuit;
        prop_assert!(c.implements(&q).unwrap());
        prop_assert!(c.t_depth() as u32 >= t_depth_lower_bound(&q));
        let b = gate_count_bounds(n, q.k_max());
        prop_assert!((c.t_count() as u128) <= b.nt_bound);
        prop_assert!((c.clifford_count() as u128) <= b.nc_bound);
        c.validate().unwrap();
    }
}

#[test]
fn bound_formulas() {
    // k·(4n³+9n²−7n)/6 and (2/3)k·n(n−1)(n+2)(2n−1) + n(2n+3)
    let b = gate_count_bounds(1, 1);
    assert_eq!((b.nt_bound, b.nc_bound), (1, 5));
    let b = gate_count_bounds(3, 2);
    assert_eq!(b.nt_bound, 2 * (108 + 81 - 21) / 6);
    assert_eq!(b.nc_bound, 2 * 2 * 3 * 2 * 5 * 5 / 3 + 27);
}

#[test]
fn identity_and_single_generators() {
    assert_eq!(synthesize(&TransferMatrix::identity(3)).unwrap().circuit.gate_count(), 0);
    for g in GeneratorId::all(3) {
        let q = TransferMatrix::generator(3, g).unwrap();
        let c = synthesize(&q).unwrap().circuit;
        assert!(c.implements(&q).unwrap());
        assert_eq!(c.t_count(), usize::from(g.is_t()));
    }
}

#[test]
fn rejects_non_orthogonal_and_reflections() {
    let mut e = TransferMatrix::identity(1).entries().to_vec();
    e[0] = -RingScalar::one();
    let refl = TransferMatrix::from_entries(1, e).unwrap();
    assert!(matches!(synthesize(&refl), Err(Error::NotOrthogonal(_))));
    let mut e = TransferMatrix::identity(1).entries().to_vec();
    e[1] = RingScalar::inv_sqrt2();
    let skew = TransferMatrix::from_entries(1, e).unwrap();
    assert!(synthesize(&skew).is_err());
}

#[test]
fn xx_target_synthesizes() {
    for n in [4, 8] {
        let x = xx_target(n).unwrap();
        assert!(x.block_diagonalizes().unwrap());
        let c = synthesize(&x.q_dis).unwrap().circuit;
        assert!(c.implements(&x.q_dis).unwrap());
    }
}
