//! T-count minimization at fixed depth with weighted MAX-SAT.

use mgs::satenc::{decode, encode_maxsat, solve_maxsat, MaxSatOutcome, SolveOptions};
use mgs::somat::{eval_product, GateKind::*, GeneratorId};

fn main() -> mgs::Result<()> {
    // T̃T̃ = S̃ on one qubit, so this target needs no T gates at all
    let word = [GeneratorId::new(Ttil, 1), GeneratorId::new(Ttil, 1), GeneratorId::new(Rtil, 1), GeneratorId::new(Ttil, 2)];
    let q = eval_product(2, &word)?;
    println!("input word: T-count {}", word.iter().filter(|g| g.is_t()).count());
    for d in 2..=4 {
        let inst = encode_maxsat(&q, d, true)?;
        match solve_maxsat(&inst, &SolveOptions::default(), None)? {
            MaxSatOutcome::Optimum { cost, model } => {
                let c = decode(&model, &inst.hard.varmap, &q)?;
                println!("depth {d}: optimal T-count {cost} (circuit has {} gates)", c.gate_count());
            }
            MaxSatOutcome::Unsat => println!("depth {d}: no circuit"),
            MaxSatOutcome::Unknown { .. } => println!("depth {d}: unknown"),
        }
    }
    Ok(())
}
