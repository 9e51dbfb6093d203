use mgs::satenc::cnf::{emit_dimacs, emit_wcnf, parse_dimacs, CnfInstance};
use mgs::satenc::search::{search_depth, SearchOptions};
use mgs::satenc::{
    decode, encode, encode_maxsat, encode_stateprep, solve, solve_maxsat, vacuum_covariance, MaxSatOutcome, Outcome,
    SolveOptions, SolverChoice,
};
use mgs::targets::{random_layered_circuit, random_ring_target};
use mgs::{eval_product, Circuit, Error, GateKind, GeneratorId, TransferMatrix};

fn g(kind: GateKind, q: usize) -> GeneratorId {
    GeneratorId::new(kind, q)
}

fn builtin(inst: &CnfInstance) -> Outcome {
    solve(inst, &SolveOptions::default(), None).unwrap()
}

fn maxsat_cost(q: &TransferMatrix, d: usize) -> Option<u64> {
    match solve_maxsat(&encode_maxsat(q, d, true).unwrap(), &SolveOptions::default(), None).unwrap() {
        MaxSatOutcome::Optimum { cost, .. } => Some(cost),
        MaxSatOutcome::Unsat => None,
        other => panic!("{other:?}"),
    }
}

#[test]
fn golden_ttil_depth_one() {
    let t = TransferMatrix::generator(1, g(GateKind::Ttil, 1)).unwrap();
    let text = emit_dimacs(&encode(&t, 1, true).unwrap());
    assert_eq!(text, include_str!("golden/ttil_d1.cnf"));
    let back = parse_dimacs(&text).unwrap();
    assert_eq!(emit_dimacs(&back), text);
}

#[test]
fn emission_basics() {
    assert_eq!(emit_dimacs(&CnfInstance::default()), "p cnf 0 0\n");
    let unit = CnfInstance { num_vars: 1, clauses: vec![vec![1]], ..Default::default() };
    assert_eq!(emit_dimacs(&unit), "p cnf 1 1\n1 0\n");
    let s = TransferMatrix::generator(2, g(GateKind::Stil, 2)).unwrap();
    let w = encode_maxsat(&s, 2, true).unwrap();
    let hard = encode(&s, 2, true).unwrap();
    assert_eq!(w.hard.clauses, hard.clauses);
    // two T kinds per qubit, per layer
    assert_eq!(w.soft.len(), 2 * 2 * 2);
    assert!(emit_wcnf(&w).starts_with(&format!("p wcnf {} {} 9\n", hard.num_vars, hard.clauses.len() + 8)));
    assert!(hard.clauses.iter().all(|c| !c.is_empty()));
}

#[test]
fn selectors_are_constrained() {
    for parallel in [true, false] {
        let q = random_ring_target(2, 2, 5);
        let inst = encode(&q, 3, parallel).unwrap();
        for layer in &inst.varmap.selectors {
            for &v in layer {
                assert!(inst.clauses.iter().any(|c| c.iter().any(|l| l.abs() == v)), "selector {v} unused");
            }
        }
    }
}

#[test]
fn small_examples() {
    let t = TransferMatrix::generator(1, g(GateKind::Ttil, 1)).unwrap();
    let inst = encode(&t, 1, true).unwrap();
    let Outcome::Sat(m) = builtin(&inst) else { panic!() };
    let c = decode(&m, &inst.varmap, &t).unwrap();
    assert_eq!(c.gates(), vec![g(GateKind::Ttil, 1)]);
    assert_eq!(builtin(&encode(&t, 0, true).unwrap()), Outcome::Unsat);

    let id = TransferMatrix::identity(1);
    assert!(matches!(builtin(&encode(&id, 0, true).unwrap()), Outcome::Sat(_)));
    assert_eq!(builtin(&encode(&id, 1, true).unwrap()), Outcome::Unsat);
    let inst = encode(&id, 2, true).unwrap();
    let Outcome::Sat(m) = builtin(&inst) else { panic!() };
    let c = decode(&m, &inst.varmap, &id).unwrap();
    assert_eq!(c.depth(), 2);
    assert!(eval_product(1, &c.gates()).unwrap().is_identity());
}

#[test]
fn tampered_model_is_rejected() {
    let t = TransferMatrix::generator(2, g(GateKind::Ttil, 1)).unwrap();
    let inst = encode(&t, 1, true).unwrap();
    let Outcome::Sat(mut m) = builtin(&inst) else { panic!() };
    for &v in &inst.varmap.selectors[0] {
        m[v as usize - 1] = false;
    }
    let j = inst.varmap.gens.iter().position(|&h| h == g(GateKind::Stil, 2)).unwrap();
    m[inst.varmap.selectors[0][j] as usize - 1] = true;
    assert!(matches!(decode(&m, &inst.varmap, &t), Err(Error::Verification(_))));
}

#[test]
fn scale_infeasibility() {
    for seed in 0..6 {
        let q = random_ring_target(2, 6, seed);
        for d in 0..q.k_max() as usize {
            assert_eq!(builtin(&encode(&q, d, true).unwrap()), Outcome::Unsat, "seed {seed} d {d}");
        }
    }
}

#[test]
fn planted_depths_are_sat() {
    for seed in 0..50u64 {
        let d0 = 1 + (seed % 4) as usize;
        let c = random_layered_circuit(2, d0, seed);
        let q = c.eval().unwrap();
        let inst = encode(&q, d0, true).unwrap();
        let Outcome::Sat(m) = builtin(&inst) else { panic!("seed {seed} not SAT at {d0}") };
        let got = decode(&m, &inst.varmap, &q).unwrap();
        assert!(got.implements(&q).unwrap());
        assert!(got.t_depth() as u32 >= q.k_max());
    }
}

#[test]
fn padding_monotonicity() {
    for seed in 0..8u64 {
        let c = random_layered_circuit(2, 2, 100 + seed);
        let q = c.eval().unwrap();
        for d in [2, 3] {
            if matches!(builtin(&encode(&q, d, true).unwrap()), Outcome::Sat(_)) {
                assert!(matches!(builtin(&encode(&q, d + 2, true).unwrap()), Outcome::Sat(_)), "seed {seed} d {d}");
            }
        }
    }
}

#[test]
fn maxsat_costs() {
    let s = TransferMatrix::generator(1, g(GateKind::Stil, 1)).unwrap();
    assert_eq!(maxsat_cost(&s, 1), Some(0));
    let t = TransferMatrix::generator(1, g(GateKind::Ttil, 1)).unwrap();
    assert_eq!(maxsat_cost(&t, 1), Some(1));
    for seed in 0..4u64 {
        let q = random_layered_circuit(2, 2, 200 + seed).eval().unwrap();
        let a = maxsat_cost(&q, 2).expect("planted depth is SAT");
        let b = maxsat_cost(&q, 4).expect("padding keeps SAT");
        assert!(b <= a, "seed {seed}: {b} > {a}");
    }
}

#[test]
fn clause_count_scaling() {
    let mut worst: f64 = 0.0;
    let mut counts = Vec::new();
    for n in 1..=3usize {
        for d in 1..=4usize {
            let q = random_ring_target(n, 1, 7);
            let inst = encode(&q, d.max(q.k_max() as usize), true).unwrap();
            let ratio = inst.clauses.len() as f64 / (d.max(q.k_max() as usize) * n.pow(5)) as f64;
            worst = worst.max(ratio);
            counts.push((n, d, inst.clauses.len()));
        }
    }
    // one constant covers the whole grid
    assert!(worst < 5000.0, "C = {worst}, counts {counts:?}");
}

#[test]
fn stateprep() {
    let g0 = vacuum_covariance(2);
    assert!(matches!(builtin(&encode_stateprep(&g0, 0, true).unwrap()), Outcome::Sat(_)));
    let s = TransferMatrix::generator(2, g(GateKind::Stil, 1)).unwrap();
    let gamma = s.matmul(&g0).unwrap().matmul(&s.transpose()).unwrap();
    let inst = encode_stateprep(&gamma, 1, true).unwrap();
    let Outcome::Sat(m) = builtin(&inst) else { panic!() };
    mgs::satenc::decode_stateprep(&m, &inst.varmap, &gamma).unwrap();
    let w = Circuit::from_gates(2, &[g(GateKind::Ttil, 1), g(GateKind::Rtil, 1), g(GateKind::Ttil, 2)]).eval().unwrap();
    let deep = w.matmul(&g0).unwrap().matmul(&w.transpose()).unwrap();
    if deep.k_max() == 2 {
        assert_eq!(builtin(&encode_stateprep(&deep, 1, true).unwrap()), Outcome::Unsat);
    }
    assert!(matches!(encode_stateprep(&TransferMatrix::identity(2), 1, true), Err(Error::NotCovariance(_))));
}

#[test]
fn search_examples() {
    let t = TransferMatrix::generator(1, g(GateKind::Ttil, 1)).unwrap();
    assert_eq!(search_depth(&t, 4, &SearchOptions::default()).unwrap().optimal, Some(1));
    let id = TransferMatrix::identity(3);
    assert_eq!(search_depth(&id, 4, &SearchOptions::default()).unwrap().optimal, Some(0));
}

#[test]
fn external_solver_via_cli() {
    let cmd = format!("{} dimacs-solve", env!("CARGO_BIN_EXE_mgs"));
    let opts = SolveOptions { solver: SolverChoice::External(cmd), timeout: None };
    let c = random_layered_circuit(2, 2, 3);
    let q = c.eval().unwrap();
    let inst = encode(&q, 2, true).unwrap();
    let Outcome::Sat(m) = solve(&inst, &opts, None).unwrap() else { panic!() };
    decode(&m, &inst.varmap, &q).unwrap();
    assert_eq!(solve(&encode(&q, 1, true).unwrap(), &opts, None).unwrap(), Outcome::Unsat);
    let t = TransferMatrix::generator(1, g(GateKind::Ttil, 1)).unwrap();
    match solve_maxsat(&encode_maxsat(&t, 1, true).unwrap(), &opts, None).unwrap() {
        MaxSatOutcome::Optimum { cost, .. } => assert_eq!(cost, 1),
        other => panic!("{other:?}"),
    }
    let missing = SolveOptions { solver: SolverChoice::External("/no/such/solver".into()), timeout: None };
    assert!(matches!(solve(&inst, &missing, None), Err(Error::SolverProcess(_))));
}
