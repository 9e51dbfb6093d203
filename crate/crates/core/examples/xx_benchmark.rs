//! The XX-chain benchmark: the orthogonal map diagonalizing a periodic
//! free-fermion hopping ring, synthesized exactly and (optionally) with SAT.
//!
//! `cargo run --release --example xx_benchmark -- 12` also probes depth 12
//! with the SAT solver from `MGS_SAT_SOLVER` (builtin if unset).

use std::time::{Duration, Instant};

use mgs::exact::synthesize;
use mgs::satenc::{decode, encode, solve, Outcome, SolveOptions, SolverChoice, SAT_SOLVER_ENV};
use mgs::targets::xx_target;

fn main() -> mgs::Result<()> {
    for n in [4, 8] {
        let x = xx_target(n)?;
        println!("n={n}: k_max {}, block-diagonalizes h_xx: {}", x.q_dis.k_max(), x.block_diagonalizes()?);
        let e: Vec<String> = x.energies.iter().map(|e| format!("{e:+.3}")).collect();
        println!("  mode energies {}", e.join(" "));
        let rep = synthesize(&x.q_dis)?;
        let c = &rep.circuit;
        println!("  exact synthesis: depth {}, T-count {}, T-depth {}, verified {}", c.depth(), c.t_count(), c.t_depth(), c.implements(&x.q_dis)?);
    }
    if let Some(d) = std::env::args().nth(1).and_then(|s| s.parse::<usize>().ok()) {
        let x = xx_target(4)?;
        let inst = encode(&x.q_dis, d, true)?;
        let opts = SolveOptions { solver: SolverChoice::from_config(None, SAT_SOLVER_ENV), timeout: Some(Duration::from_secs(1800)) };
        println!("SAT probe n=4 d={d}: {} vars, {} clauses", inst.num_vars, inst.clauses.len());
        let t = Instant::now();
        match solve(&inst, &opts, None)? {
            Outcome::Sat(m) => {
                let c = decode(&m, &inst.varmap, &x.q_dis)?;
                println!("  SAT in {:.1?}: T-count {}", t.elapsed(), c.t_count());
            }
            other => println!("  {other:?} after {:.1?}", t.elapsed()),
        }
    }
    Ok(())
}
