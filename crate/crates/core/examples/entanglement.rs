//! Spurious entanglement of compiled single-qubit rotations: a two-qubit
//! matchgate approximation `U_ε` of `R^z(θ) ⊗ 1` has operator entanglement
//! at most `1 − (1 − e²/2)⁴ ≈ 2e²` for operator-norm error `e`.

use mgs::approx::{map_word, su2_search, PlanarRotation, SearchConfig, Su2};
use mgs::spinrep::{gen_gates, op_norm_dist, operator_entanglement, DenseUnitary, Gate, DEFAULT_QUBIT_CAP};

fn main() -> mgs::Result<()> {
    let cfg = SearchConfig::default();
    println!("theta    eps_target  e          E(U)        bound");
    for eps in [1e-1, 3e-2] {
        for k in 0..8 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 8.0 + 0.1;
            let rot = PlanarRotation { plane: 1, theta };
            let (word, _) = su2_search(&Su2::rz(theta), eps, &cfg)?;
            let gates = map_word(&word, &rot, 2)?;
            let u = DenseUnitary::from_gates(2, &gen_gates(&gates), DEFAULT_QUBIT_CAP)?;
            let exact = DenseUnitary::from_gates(2, &[Gate::Rz { q: 1, theta }], DEFAULT_QUBIT_CAP)?;
            let e = op_norm_dist(&u, &exact)?;
            let ent = operator_entanglement(&u)?;
            let bound = 1.0 - (1.0 - e * e / 2.0).powi(4);
            assert!(ent <= bound + 1e-12);
            println!("{theta:.4}  {eps:10.0e}  {e:.3e}  {ent:.3e}  {bound:.3e}");
        }
    }
    Ok(())
}
