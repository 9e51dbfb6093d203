//! SAT encoding of fixed-depth exact synthesis.
//!
//! Layer `i` holds `Ŵ_i = √2^i · G_i ⋯ G_1` with entries in Z[√2], each
//! component a two's-complement word of width `⌈i/2⌉ + 2`. Since both `W_i`
//! and its Galois conjugate are orthogonal, every component of `Ŵ_i` is
//! bounded by `√2^i`, so no word can overflow. A layer maps `Ŵ_{i−1}` to
//! `√2·G_i·Ŵ_{i−1}`, whose generator blocks all have entries in {0, ±1}, so
//! every row update is a multiplexer over a handful of sums and negations.

pub mod cnf;
pub mod external;
pub mod maxsat;
pub mod search;
pub mod solver;

use std::sync::atomic::AtomicBool;
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::somat::{eval_product, GeneratorId, TransferMatrix};
use cnf::{const_word, resize, shl, Bit, Builder, CnfInstance, VarMap, WcnfInstance, Word, ZWord};

pub use cnf::{emit_dimacs, emit_wcnf};
pub use maxsat::MaxSatOutcome;
pub use solver::Outcome;

/// Default ceiling on the estimated number of variables per instance.
pub const DEFAULT_VAR_LIMIT: usize = 20_000_000;

/// Two's-complement width of each component at layer `i`.
pub fn layer_width(i: usize) -> usize {
    i.div_ceil(2) + 2
}

/// Rough variable count of a depth-`d` instance on `n` qubits.
pub fn estimate_vars(n: usize, d: usize) -> usize {
    let dim = 2 * n;
    (1..=d).map(|i| dim * dim * layer_width(i) * 24 + 8 * n).sum()
}

fn check_capacity(n: usize, d: usize) -> Result<()> {
    let est = estimate_vars(n, d);
    if est > DEFAULT_VAR_LIMIT {
        return Err(Error::Capacity(format!("about {est} variables for n = {n}, d = {d}")));
    }
    Ok(())
}

fn contradiction(varmap: VarMap) -> CnfInstance {
    let b = Builder { contradiction: true, ..Builder::default() };
    b.finish(varmap)
}

fn identity_words(n: usize) -> Vec<ZWord> {
    let dim = 2 * n;
    let w = layer_width(0);
    (0..dim * dim)
        .map(|k| {
            let one = BigInt::from(u8::from(k / dim == k % dim));
            ZWord { a: const_word(&one, w).expect("fits"), b: const_word(&BigInt::from(0), w).expect("fits") }
        })
        .collect()
}

fn zresize(x: &ZWord, w: usize) -> ZWord {
    ZWord { a: resize(&x.a, w), b: resize(&x.b, w) }
}

/// `√2 · x`.
fn zsqrt2(x: &ZWord) -> ZWord {
    ZWord { a: shl(&x.b, 1), b: x.a.clone() }
}

fn zneg(b: &mut Builder, x: &ZWord) -> ZWord {
    ZWord { a: b.neg(&x.a), b: b.neg(&x.b) }
}

fn zadd(b: &mut Builder, x: &ZWord, y: &ZWord) -> ZWord {
    ZWord { a: b.add(&x.a, &y.a, cnf::FALSE), b: b.add(&x.b, &y.b, cnf::FALSE) }
}

fn zsub(b: &mut Builder, x: &ZWord, y: &ZWord) -> ZWord {
    ZWord { a: b.sub(&x.a, &y.a), b: b.sub(&x.b, &y.b) }
}

fn zmux(b: &mut Builder, cands: &[(Bit, &ZWord)]) -> ZWord {
    let a: Vec<(Bit, &Word)> = cands.iter().map(|(s, z)| (*s, &z.a)).collect();
    let bb: Vec<(Bit, &Word)> = cands.iter().map(|(s, z)| (*s, &z.b)).collect();
    ZWord { a: b.mux(&a), b: b.mux(&bb) }
}

/// Selector variables, structural clauses and the bit-blasted layer
/// arithmetic. Returns the builder, the variable map and `Ŵ_d` (row-major).
fn build_layers(n: usize, d: usize, parallel: bool) -> (Builder, VarMap, Vec<ZWord>) {
    let dim = 2 * n;
    let gens = GeneratorId::all(n);
    let mut b = Builder::default();
    let selectors: Vec<Vec<i32>> = (0..d).map(|_| gens.iter().map(|_| b.fresh()).collect()).collect();
    let aux_start = b.num_vars + 1;
    let mut state = identity_words(n);

    for (i, layer) in selectors.iter().enumerate() {
        let sel: Vec<Bit> = layer.iter().map(|&v| Bit::Lit(v)).collect();
        b.clause(&sel);
        for x in 0..gens.len() {
            for y in x + 1..gens.len() {
                if !parallel || gens[x].overlaps(gens[y]) {
                    b.clause(&[!sel[x], !sel[y]]);
                }
            }
        }
        // row α is left alone (scaled by √2) exactly when no selected gate touches it
        let mut touching: Vec<Vec<usize>> = vec![Vec::new(); dim];
        for (j, g) in gens.iter().enumerate() {
            touching[g.plane()].push(j);
            touching[g.plane() + 1].push(j);
        }
        let idle: Vec<Bit> = touching
            .iter()
            .map(|ts| {
                let u = Bit::Lit(b.fresh());
                for &j in ts {
                    b.clause(&[!sel[j], u]);
                }
                let mut c: Vec<Bit> = ts.iter().map(|&j| sel[j]).collect();
                c.push(!u);
                b.clause(&c);
                !u
            })
            .collect();

        let w = layer_width(i + 1);
        let mut next = vec![ZWord { a: Vec::new(), b: Vec::new() }; dim * dim];
        for c in 0..dim {
            let old: Vec<ZWord> = (0..dim).map(|r| zresize(&state[r * dim + c], w)).collect();
            let pos: Vec<ZWord> = old.iter().map(zsqrt2).collect();
            let neg: Vec<ZWord> = pos.iter().map(|x| zneg(&mut b, x)).collect();
            let mut planes: Vec<Option<(ZWord, ZWord, ZWord)>> = vec![None; dim];
            for p in (0..dim).step_by(2) {
                let sum = zadd(&mut b, &old[p], &old[p + 1]);
                let diff = zsub(&mut b, &old[p], &old[p + 1]);
                let rdiff = zsub(&mut b, &old[p + 1], &old[p]);
                planes[p] = Some((sum, diff, rdiff));
            }
            for r in 0..dim {
                let mut cands: Vec<(Bit, &ZWord)> = vec![(idle[r], &pos[r])];
                for &j in &touching[r] {
                    let g = gens[j];
                    let p = g.plane();
                    let top = r == p;
                    use crate::somat::GateKind::*;
                    let word: &ZWord = match (g.kind, top) {
                        (Stil | Rtil, true) => &pos[p + 1],
                        (Stil | Rtil, false) => &neg[p],
                        (StilInv | RtilInv, true) => &neg[p + 1],
                        (StilInv | RtilInv, false) => &pos[p],
                        (Ttil, true) | (TtilInv, false) => &planes[p].as_ref().expect("T plane").0,
                        (TtilInv, true) => &planes[p].as_ref().expect("T plane").1,
                        (Ttil, false) => &planes[p].as_ref().expect("T plane").2,
                    };
                    cands.push((sel[j], word));
                }
                next[r * dim + c] = zmux(&mut b, &cands);
            }
        }
        state = next;
    }
    let varmap = VarMap { n, depth: d, gens, selectors, aux_start };
    (b, varmap, state)
}

fn check_target(q: &TransferMatrix) -> Result<()> {
    if q.n() == 0 {
        return Err(Error::Domain("zero-qubit target".into()));
    }
    if !q.is_verified() && !q.is_special_orthogonal() {
        return Err(Error::NotOrthogonal("target is not in SO(2n)".into()));
    }
    Ok(())
}

/// CNF that is satisfiable iff a depth-`d` circuit realizes `q`.
///
/// With `parallel` every layer holds one or more gates on disjoint qubits;
/// otherwise exactly one gate per layer.
pub fn encode(q: &TransferMatrix, d: usize, parallel: bool) -> Result<CnfInstance> {
    check_target(q)?;
    let n = q.n();
    let empty = VarMap { n, depth: d, gens: GeneratorId::all(n), selectors: vec![Vec::new(); d], aux_start: 1 };
    if d == 0 {
        let vm = VarMap { selectors: Vec::new(), ..empty };
        return Ok(if q.is_identity() { Builder::default().finish(vm) } else { contradiction(vm) });
    }
    if (d as u32) < q.k_max() {
        return Ok(contradiction(empty));
    }
    check_capacity(n, d)?;
    let (mut b, varmap, state) = build_layers(n, d, parallel);
    for (x, want) in state.iter().zip(q.scaled(d as u32)) {
        b.equal_const(&x.a, &want.a);
        b.equal_const(&x.b, &want.b);
    }
    Ok(b.finish(varmap))
}

/// [`encode`] plus a unit-weight soft clause `¬x` for every T-kind selector.
pub fn encode_maxsat(q: &TransferMatrix, d: usize, parallel: bool) -> Result<WcnfInstance> {
    let hard = encode(q, d, parallel)?;
    let soft = hard.varmap.t_selectors().into_iter().map(|v| (1, vec![-v])).collect();
    Ok(WcnfInstance { hard, soft })
}

/// Covariance `⊕ [[0,−1],[1,0]]` of |0…0⟩ under the Majorana convention in `spinrep`.
pub fn vacuum_covariance(n: usize) -> TransferMatrix {
    let mut m = TransferMatrix::identity(n);
    for q in 1..=n {
        m.apply_left(GeneratorId::new(crate::somat::GateKind::StilInv, q));
    }
    m
}

fn check_covariance(gamma: &TransferMatrix) -> Result<()> {
    let dim = gamma.dim();
    for i in 0..dim {
        for j in 0..dim {
            if !(gamma.get(i, j) + gamma.get(j, i)).is_zero() {
                return Err(Error::NotCovariance(format!("entry ({i}, {j}) breaks antisymmetry")));
            }
        }
    }
    let sq = gamma.matmul(gamma)?;
    let mut minus = TransferMatrix::identity(gamma.n()).entries().to_vec();
    for x in &mut minus {
        *x = -x.clone();
    }
    if sq.entries() != minus.as_slice() {
        return Err(Error::NotCovariance("Γ² ≠ −I".into()));
    }
    Ok(())
}

/// `c · x` for an integer constant, by shift-and-add.
fn mul_const(b: &mut Builder, x: &Word, c: &BigInt) -> Word {
    let w = x.len();
    let mag = c.magnitude();
    let mut acc: Word = vec![cnf::FALSE; w];
    for t in 0..(mag.bits() as usize).min(w) {
        if mag.bit(t as u64) {
            acc = b.add(&acc, &shl(x, t), cnf::FALSE);
        }
    }
    if c.sign() == num_bigint::Sign::Minus {
        acc = b.neg(&acc);
    }
    acc
}

/// CNF that is satisfiable iff a depth-`d` circuit `W` prepares the
/// covariance `gamma = W Γ₀ Wᵀ` from the vacuum `Γ₀`.
///
/// Encoded as the linear condition `W Γ₀ = Γ W`, which together with the
/// orthogonality of `W` is equivalent.
pub fn encode_stateprep(gamma: &TransferMatrix, d: usize, parallel: bool) -> Result<CnfInstance> {
    check_covariance(gamma)?;
    let n = gamma.n();
    let g0 = vacuum_covariance(n);
    let empty = VarMap { n, depth: d, gens: GeneratorId::all(n), selectors: vec![Vec::new(); d], aux_start: 1 };
    if d == 0 {
        let vm = VarMap { selectors: Vec::new(), ..empty };
        return Ok(if *gamma == g0 { Builder::default().finish(vm) } else { contradiction(vm) });
    }
    // the first layer maps Γ₀ to an integer matrix; each later layer adds at most 2 to the LDE
    let kg = gamma.k_max() as usize;
    if kg > 2 * (d - 1) {
        return Ok(contradiction(empty));
    }
    check_capacity(n, d)?;
    let (mut b, varmap, state) = build_layers(n, d, parallel);
    let dim = 2 * n;
    let w = (kg + d).div_ceil(2) + 2;
    let wide: Vec<ZWord> = state.iter().map(|x| zresize(x, w)).collect();
    let gs = gamma.scaled(kg as u32);
    for r in 0..dim {
        for c in 0..dim {
            // (Ŵ Γ₀)[r][c]: Γ₀ has a single ±1 in each column, in the partner row
            let k = c ^ 1;
            let x = &wide[r * dim + k];
            let mut lhs = if g0.get(k, c).is_one() { x.clone() } else { zneg(&mut b, x) };
            for _ in 0..kg {
                lhs = zsqrt2(&lhs);
            }
            let mut rhs = ZWord { a: vec![cnf::FALSE; w], b: vec![cnf::FALSE; w] };
            for k in 0..dim {
                let g = &gs[r * dim + k];
                if g.is_zero() {
                    continue;
                }
                let x = &wide[k * dim + c];
                // (ga + gb√2)(A + B√2) = (ga·A + 2gb·B) + (ga·B + gb·A)√2
                let aa = mul_const(&mut b, &x.a, &g.a);
                let bb = mul_const(&mut b, &shl(&x.b, 1), &g.b);
                let ab = mul_const(&mut b, &x.b, &g.a);
                let ba = mul_const(&mut b, &x.a, &g.b);
                let term = ZWord { a: b.add(&aa, &bb, cnf::FALSE), b: b.add(&ab, &ba, cnf::FALSE) };
                rhs = zadd(&mut b, &rhs, &term);
            }
            b.equal(&lhs.a, &rhs.a);
            b.equal(&lhs.b, &rhs.b);
        }
    }
    Ok(b.finish(varmap))
}

/// Read the selected gates off a model (indexed from variable 1).
pub fn read_circuit(model: &[bool], varmap: &VarMap) -> Circuit {
    let on = |v: i32| model.get(v as usize - 1).copied().unwrap_or(false);
    let layers = varmap
        .selectors
        .iter()
        .map(|layer| layer.iter().zip(&varmap.gens).filter(|(&v, _)| on(v)).map(|(_, &g)| g).collect())
        .collect();
    Circuit { n: varmap.n, layers, provenance: format!("sat depth={}", varmap.depth) }
}

/// Decode a model and check that the circuit realizes `target` exactly.
pub fn decode(model: &[bool], varmap: &VarMap, target: &TransferMatrix) -> Result<Circuit> {
    let c = read_circuit(model, varmap);
    c.validate()?;
    let got = eval_product(c.n, &c.gates())?;
    if got != *target {
        return Err(Error::Verification("decoded circuit does not reproduce the target".into()));
    }
    Ok(c)
}

/// Decode a state-preparation model and check `W Γ₀ Wᵀ = gamma`.
pub fn decode_stateprep(model: &[bool], varmap: &VarMap, gamma: &TransferMatrix) -> Result<Circuit> {
    let c = read_circuit(model, varmap);
    c.validate()?;
    let w = eval_product(c.n, &c.gates())?;
    let got = w.matmul(&vacuum_covariance(c.n))?.matmul(&w.transpose())?;
    if got != *gamma {
        return Err(Error::Verification("decoded circuit does not prepare the covariance".into()));
    }
    Ok(c.with_provenance(&format!("stateprep depth={}", varmap.depth)))
}

/// Which solver runs an instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum SolverChoice {
    #[default]
    Builtin,
    /// Command line of an external solver; the instance path is appended.
    External(String),
}

impl SolverChoice {
    /// The environment variable `var` if set, else `flag`, else builtin.
    pub fn from_config(flag: Option<&str>, var: &str) -> SolverChoice {
        let env = std::env::var(var).ok().filter(|s| !s.trim().is_empty());
        match env.or_else(|| flag.map(str::to_owned)).filter(|s| !s.trim().is_empty()) {
            Some(cmd) => SolverChoice::External(cmd),
            None => SolverChoice::Builtin,
        }
    }
}

pub const SAT_SOLVER_ENV: &str = "MGS_SAT_SOLVER";
pub const MAXSAT_SOLVER_ENV: &str = "MGS_MAXSAT_SOLVER";

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub solver: SolverChoice,
    pub timeout: Option<Duration>,
}

/// Solve a CNF instance. A returned model has `num_vars` entries.
pub fn solve(inst: &CnfInstance, opts: &SolveOptions, cancel: Option<&AtomicBool>) -> Result<Outcome> {
    let deadline = opts.timeout.map(|t| Instant::now() + t);
    let out = match &opts.solver {
        SolverChoice::Builtin => {
            let mut s = solver::Solver::from_clauses(inst.num_vars, &inst.clauses);
            s.solve(deadline, cancel)
        }
        SolverChoice::External(cmd) => external::run_sat(cmd, inst, deadline, cancel)?,
    };
    Ok(match out {
        Outcome::Sat(mut m) => {
            m.resize(inst.num_vars, false);
            if !solver::satisfies(&inst.clauses, &m) {
                return Err(Error::Verification("solver model violates the instance".into()));
            }
            Outcome::Sat(m)
        }
        other => other,
    })
}

/// Solve a weighted instance to optimality.
pub fn solve_maxsat(inst: &WcnfInstance, opts: &SolveOptions, cancel: Option<&AtomicBool>) -> Result<MaxSatOutcome> {
    let deadline = opts.timeout.map(|t| Instant::now() + t);
    match &opts.solver {
        SolverChoice::Builtin => Ok(maxsat::solve(inst, deadline, cancel)),
        SolverChoice::External(cmd) => external::run_maxsat(cmd, inst, deadline, cancel),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::somat::GateKind;

    fn g(kind: GateKind, q: usize) -> GeneratorId {
        GeneratorId::new(kind, q)
    }

    fn run(inst: &CnfInstance) -> Outcome {
        solve(inst, &SolveOptions::default(), None).unwrap()
    }

    #[test]
    fn ttil_depth_one() {
        let q = TransferMatrix::generator(1, g(GateKind::Ttil, 1)).unwrap();
        let inst = encode(&q, 1, true).unwrap();
        let Outcome::Sat(m) = run(&inst) else { panic!("expected SAT") };
        let c = decode(&m, &inst.varmap, &q).unwrap();
        assert_eq!(c.gates(), vec![g(GateKind::Ttil, 1)]);
        assert_eq!(run(&encode(&q, 0, true).unwrap()), Outcome::Unsat);
    }

    #[test]
    fn identity_cases() {
        let id = TransferMatrix::identity(2);
        let inst = encode(&id, 0, true).unwrap();
        assert_eq!(emit_dimacs(&inst), "p cnf 0 0\n");
        assert!(matches!(run(&inst), Outcome::Sat(_)));
        assert_eq!(run(&encode(&id, 1, true).unwrap()), Outcome::Unsat);
        let inst = encode(&id, 2, false).unwrap();
        let Outcome::Sat(m) = run(&inst) else { panic!("expected SAT") };
        let c = decode(&m, &inst.varmap, &id).unwrap();
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn tampered_model_is_caught() {
        let q = TransferMatrix::generator(2, g(GateKind::Stil, 1)).unwrap();
        let inst = encode(&q, 1, true).unwrap();
        let Outcome::Sat(mut m) = run(&inst) else { panic!("expected SAT") };
        for &v in &inst.varmap.selectors[0] {
            m[v as usize - 1] = false;
        }
        m[inst.varmap.selectors[0][0] as usize - 1] = true;
        assert!(matches!(decode(&m, &inst.varmap, &q), Err(Error::Verification(_))));
    }

    #[test]
    fn planted_words_are_found() {
        let words = [
            vec![g(GateKind::Ttil, 1), g(GateKind::Rtil, 1), g(GateKind::TtilInv, 2)],
            vec![g(GateKind::Ttil, 1), g(GateKind::Ttil, 2), g(GateKind::RtilInv, 1), g(GateKind::Ttil, 2)],
        ];
        for w in words {
            let q = eval_product(2, &w).unwrap();
            let inst = encode(&q, w.len(), false).unwrap();
            let Outcome::Sat(m) = run(&inst) else { panic!("expected SAT for {w:?}") };
            decode(&m, &inst.varmap, &q).unwrap();
        }
    }

    #[test]
    fn parallel_layers_shorten_depth() {
        let w = [g(GateKind::Ttil, 1), g(GateKind::Ttil, 2)];
        let q = eval_product(2, &w).unwrap();
        let Outcome::Sat(m) = run(&encode(&q, 1, true).unwrap()) else { panic!("expected SAT") };
        let inst = encode(&q, 1, true).unwrap();
        assert_eq!(decode(&m, &inst.varmap, &q).unwrap().gate_count(), 2);
        assert_eq!(run(&encode(&q, 1, false).unwrap()), Outcome::Unsat);
    }

    #[test]
    fn rejects_non_orthogonal() {
        let mut e = TransferMatrix::identity(1).entries().to_vec();
        e[1] = crate::ring::RingScalar::one();
        let m = TransferMatrix::from_entries(1, e).unwrap();
        assert!(matches!(encode(&m, 1, true), Err(Error::NotOrthogonal(_))));
    }

    #[test]
    fn vacuum_matches_simulator() {
        use crate::spinrep::{apply_to_zero, covariance, DenseUnitary};
        let n = 2;
        let w = [g(GateKind::Ttil, 1), g(GateKind::Rtil, 1), g(GateKind::StilInv, 2)];
        let u = DenseUnitary::from_circuit(&Circuit::from_gates(n, &w)).unwrap();
        let got = covariance(n, &apply_to_zero(&u));
        let q = eval_product(n, &w).unwrap();
        let want = q.matmul(&vacuum_covariance(n)).unwrap().matmul(&q.transpose()).unwrap().to_float().unwrap();
        assert!((got - want).abs().max() < 1e-10);
    }

    #[test]
    fn stateprep() {
        let g0 = vacuum_covariance(2);
        assert!(matches!(run(&encode_stateprep(&g0, 0, true).unwrap()), Outcome::Sat(_)));
        let s = TransferMatrix::generator(2, g(GateKind::Rtil, 1)).unwrap();
        let gamma = s.matmul(&g0).unwrap().matmul(&s.transpose()).unwrap();
        assert_ne!(gamma, g0);
        let inst = encode_stateprep(&gamma, 1, true).unwrap();
        let Outcome::Sat(m) = run(&inst) else { panic!("expected SAT") };
        decode_stateprep(&m, &inst.varmap, &gamma).unwrap();

        let w = [g(GateKind::Ttil, 1), g(GateKind::Rtil, 1), g(GateKind::Ttil, 2)];
        let q = eval_product(2, &w).unwrap();
        let gamma = q.matmul(&g0).unwrap().matmul(&q.transpose()).unwrap();
        assert!(gamma.k_max() > 0);
        assert_eq!(run(&encode_stateprep(&gamma, 1, true).unwrap()), Outcome::Unsat);
        let inst = encode_stateprep(&gamma, 3, true).unwrap();
        let Outcome::Sat(m) = run(&inst) else { panic!("expected SAT") };
        decode_stateprep(&m, &inst.varmap, &gamma).unwrap();

        let bad = TransferMatrix::identity(2);
        assert!(matches!(encode_stateprep(&bad, 1, true), Err(Error::NotCovariance(_))));
    }
}
