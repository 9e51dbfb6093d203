//! Exact synthesis of seeded random ring targets and of the n=4 XX
//! diagonalizer, with the gate-count bounds next to the observed counts.

use mgs::exact::synthesize;
use mgs::targets::{random_ring_target, xx_target};

fn main() -> mgs::Result<()> {
    println!("n  t  k_max  t_count  nt_bound  cliffords  nc_bound  depth");
    for n in 2..=4 {
        for t in [0, 2, 4, 8] {
            let q = random_ring_target(n, t, 1000 + (n * 10 + t) as u64);
            let rep = synthesize(&q)?;
            let c = &rep.circuit;
            assert!(c.implements(&q)?);
            println!(
                "{n}  {t}  {:5}  {:7}  {:8}  {:9}  {:8}  {:5}",
                rep.k_max_in,
                c.t_count(),
                rep.nt_bound,
                c.clifford_count(),
                rep.nc_bound,
                c.depth()
            );
        }
    }
    let xx = xx_target(4)?;
    let rep = synthesize(&xx.q_dis)?;
    println!(
        "XX n=4: k_max {} depth {} t_count {} t_depth {}",
        rep.k_max_in,
        rep.circuit.depth(),
        rep.circuit.t_count(),
        rep.circuit.t_depth()
    );
    Ok(())
}
