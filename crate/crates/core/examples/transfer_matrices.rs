//! The matchgate ↔ SO(2n) homomorphism: the exact ring product of a random
//! word against the transfer matrix of its dense unitary, and the double
//! cover seen through S̄⁴.

use mgs::somat::{eval_product, GateKind, GeneratorId};
use mgs::spinrep::{gen_gates, transfer_matrix, DenseUnitary, DEFAULT_QUBIT_CAP};
use mgs::targets::random_ring_word;

fn main() -> mgs::Result<()> {
    for n in 1..=4 {
        let word = random_ring_word(n, 6, 42 + n as u64);
        let exact = eval_product(n, &word)?.to_float()?;
        let u = DenseUnitary::from_gates(n, &gen_gates(&word), DEFAULT_QUBIT_CAP)?;
        let q = transfer_matrix(&u)?;
        println!("n={n} len={:2}  max|Q_spin − Q_ring| = {:.2e}", word.len(), (q - exact).abs().max());
    }

    let s4 = vec![GeneratorId::new(GateKind::Stil, 1); 4];
    let u = DenseUnitary::from_gates(1, &gen_gates(&s4), DEFAULT_QUBIT_CAP)?;
    println!("\nS̄⁴ as a unitary:\n{}", u.m.map(|z| z.re));
    println!("S̃⁴ as a transfer matrix is the identity: {}", eval_product(1, &s4)?.is_identity());
    Ok(())
}
