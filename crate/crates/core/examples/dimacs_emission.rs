//! DIMACS / WCNF emission and the external-solver adapter.
//!
//! Writes the depth-1 instance for T̃ on one qubit. If `MGS_SAT_SOLVER` is
//! set (for example `kissat -q`), the instance is also solved with it.

use mgs::satenc::{decode, emit_dimacs, emit_wcnf, encode, encode_maxsat, solve, Outcome, SolveOptions, SolverChoice, SAT_SOLVER_ENV};
use mgs::somat::{GateKind, GeneratorId, TransferMatrix};

fn main() -> mgs::Result<()> {
    let q = TransferMatrix::generator(1, GeneratorId::new(GateKind::Ttil, 1))?;
    let inst = encode(&q, 1, true)?;
    let text = emit_dimacs(&inst);
    println!("{}", text.lines().next().unwrap_or_default());
    println!("selectors (layer 1): {:?}", inst.varmap.selectors[0]);
    println!("{}", emit_wcnf(&encode_maxsat(&q, 1, true)?).lines().next().unwrap_or_default());

    let solver = SolverChoice::from_config(None, SAT_SOLVER_ENV);
    println!("solver: {solver:?}");
    let opts = SolveOptions { solver, timeout: Some(std::time::Duration::from_secs(30)) };
    match solve(&inst, &opts, None)? {
        Outcome::Sat(m) => {
            let names: Vec<String> = decode(&m, &inst.varmap, &q)?.gates().iter().map(|g| g.to_string()).collect();
            println!("SAT: {}", names.join(" "));
        }
        other => println!("{other:?}"),
    }
    Ok(())
}
