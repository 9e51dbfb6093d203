//! Preparing a Gaussian state from the vacuum: SAT on the covariance
//! condition `W Γ₀ = Γ W` instead of the full transfer matrix.

use mgs::satenc::{decode_stateprep, encode_stateprep, solve, vacuum_covariance, Outcome, SolveOptions};
use mgs::somat::{eval_product, GateKind::*, GeneratorId};

fn main() -> mgs::Result<()> {
    let n = 2;
    let g0 = vacuum_covariance(n);
    let w = [GeneratorId::new(Rtil, 1), GeneratorId::new(Ttil, 1), GeneratorId::new(Rtil, 1), GeneratorId::new(Ttil, 2)];
    let q = eval_product(n, &w)?;
    let gamma = q.matmul(&g0)?.matmul(&q.transpose())?;
    println!("target covariance (k_max {}):\n{gamma}", gamma.k_max());
    for d in 0..=4 {
        let inst = encode_stateprep(&gamma, d, true)?;
        match solve(&inst, &SolveOptions::default(), None)? {
            Outcome::Sat(m) => {
                let c = decode_stateprep(&m, &inst.varmap, &gamma)?;
                println!("depth {d}: SAT, {} gates, T-count {}", c.gate_count(), c.t_count());
                break;
            }
            other => println!("depth {d}: {other:?}"),
        }
    }
    Ok(())
}
