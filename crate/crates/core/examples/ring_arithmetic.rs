//! Exact arithmetic in D[√2]: canonical forms, denominator exponents,
//! residues mod √2 and the Galois conjugate.

use mgs::{RingScalar, ZSqrt2};

fn main() -> mgs::Result<()> {
    let h = RingScalar::inv_sqrt2();
    let x: RingScalar = "3, 1, 3".parse()?;
    let y = &h * &h;
    println!("1/√2 = {h}  lde {}", h.lde());
    println!("(1/√2)² = {y}  lde {}", y.lde());
    println!("x = {x}  ≈ {:.6}  lde {}", x.to_f64()?, x.lde());
    let prod = &x * &h;
    println!("x/√2 = {prod}  lde {}", prod.lde());
    println!("conj(x) = {}  ≈ {:.6}", x.conj(), x.conj().to_f64()?);

    println!("\nresidues of √2^lde · v (rational and irrational parity):");
    for (a, b) in [(1, 0), (0, 1), (1, 1), (2, 0), (3, 5)] {
        let z = ZSqrt2::new(a, b);
        println!("  {z}: residue {} norm {}", z.residue(), z.norm());
    }
    // the residue map is a ring homomorphism
    let (p, q) = (ZSqrt2::new(3, 1), ZSqrt2::new(1, 1));
    assert_eq!((&p * &q).residue(), p.residue() * q.residue());
    assert_eq!((&p + &q).residue(), p.residue() + q.residue());
    println!("residue(pq) = residue(p)·residue(q) = {}", (&p * &q).residue());
    Ok(())
}
