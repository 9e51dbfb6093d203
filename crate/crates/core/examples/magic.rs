//! Stabilizer entropy `2^{−n} Σ_P ⟨P⟩⁴`: 1 on stabilizer states, 3/4 on
//! `T|+⟩`, and somewhere in between for compiled matchgate circuits.

use mgs::circuit::Circuit;
use mgs::spinrep::{apply_to_zero, stabilizer_entropy, DenseUnitary};
use mgs::targets::random_layered_circuit;
use num_complex::Complex64;

fn main() -> mgs::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t_plus = [Complex64::new(s, 0.0), Complex64::from_polar(s, std::f64::consts::FRAC_PI_4)];
    println!("T|+⟩: {:.12}", stabilizer_entropy(&t_plus)?);

    for seed in 0..6 {
        let c = random_layered_circuit(3, 6, seed);
        let clifford = Circuit { layers: c.layers.iter().map(|l| l.iter().filter(|g| !g.is_t()).copied().collect()).collect(), ..c.clone() };
        let st = stabilizer_entropy(&apply_to_zero(&DenseUnitary::from_circuit(&c)?))?;
        let sc = stabilizer_entropy(&apply_to_zero(&DenseUnitary::from_circuit(&clifford)?))?;
        println!("seed {seed}: T-count {}  S = {st:.6}   T gates removed: S = {sc:.6}", c.t_count());
    }
    Ok(())
}
