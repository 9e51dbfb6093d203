//! Weighted MAX-SAT by linear SAT-UNSAT search over a sequential counter.

use std::sync::atomic::AtomicBool;
use std::time::Instant;

use super::cnf::WcnfInstance;
use super::solver::{Outcome, Solver};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaxSatOutcome {
    /// Proven minimum cost of the violated soft clauses.
    Optimum { cost: u64, model: Vec<bool> },
    /// Hard clauses are unsatisfiable.
    Unsat,
    /// Stopped early; carries the best model found, if any.
    Unknown { best: Option<(u64, Vec<bool>)> },
}

pub fn cost(inst: &WcnfInstance, model: &[bool]) -> u64 {
    inst.soft
        .iter()
        .filter(|(_, c)| !c.iter().any(|&l| model.get(l.unsigned_abs() as usize - 1).copied().unwrap_or(false) == (l > 0)))
        .map(|(w, _)| w)
        .sum()
}

/// At-most-`k` over `lits` (Sinz), with fresh variables from `next`.
fn at_most(s: &mut Solver, lits: &[i32], k: usize, next: &mut i32) {
    if k >= lits.len() {
        return;
    }
    if k == 0 {
        for &x in lits {
            s.add_clause(&[-x]);
        }
        return;
    }
    let m = lits.len();
    let base = *next;
    *next += (m * k) as i32;
    s.reserve_vars((*next - 1) as usize);
    let r = |i: usize, j: usize| base + (i * k + j) as i32;
    for i in 0..m {
        let x = lits[i];
        s.add_clause(&[-x, r(i, 0)]);
        if i > 0 {
            for j in 0..k {
                s.add_clause(&[-r(i - 1, j), r(i, j)]);
            }
            for j in 1..k {
                s.add_clause(&[-x, -r(i - 1, j - 1), r(i, j)]);
            }
            s.add_clause(&[-x, -r(i - 1, k - 1)]);
        }
    }
}

pub fn solve(inst: &WcnfInstance, deadline: Option<Instant>, cancel: Option<&AtomicBool>) -> MaxSatOutcome {
    let n = inst.hard.num_vars;
    let mut s = Solver::from_clauses(n, &inst.hard.clauses);
    let mut next = n as i32 + 1;
    // each soft clause gets a relaxation literal, repeated by weight in the counter
    let mut relax: Vec<i32> = Vec::new();
    for (w, c) in &inst.soft {
        let r = next;
        next += 1;
        s.reserve_vars(r as usize);
        let mut cl = c.clone();
        cl.push(r);
        s.add_clause(&cl);
        for _ in 0..*w {
            relax.push(r);
        }
    }
    let mut best: Option<(u64, Vec<bool>)> = None;
    loop {
        match s.solve(deadline, cancel) {
            Outcome::Sat(mut m) => {
                m.truncate(n);
                let c = cost(inst, &m);
                if c == 0 {
                    return MaxSatOutcome::Optimum { cost: 0, model: m };
                }
                best = Some((c, m));
                at_most(&mut s, &relax, c as usize - 1, &mut next);
            }
            Outcome::Unsat => {
                return match best {
                    Some((cost, model)) => MaxSatOutcome::Optimum { cost, model },
                    None => MaxSatOutcome::Unsat,
                }
            }
            Outcome::Unknown => return MaxSatOutcome::Unknown { best },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satenc::cnf::CnfInstance;

    #[test]
    fn small_optimum() {
        // x1 ∨ x2, x2 → x3; prefer ¬x1, ¬x2, ¬x3 with weights 1, 3, 1
        let hard = CnfInstance { num_vars: 3, clauses: vec![vec![1, 2], vec![-2, 3]], ..Default::default() };
        let inst = WcnfInstance { hard, soft: vec![(1, vec![-1]), (3, vec![-2]), (1, vec![-3])] };
        match solve(&inst, None, None) {
            MaxSatOutcome::Optimum { cost, model } => {
                assert_eq!(cost, 1);
                assert!(model[0] && !model[1]);
            }
            other => panic!("{other:?}"),
        }
        let hard = CnfInstance { num_vars: 1, clauses: vec![vec![1], vec![-1]], ..Default::default() };
        assert_eq!(solve(&WcnfInstance { hard, soft: vec![] }, None, None), MaxSatOutcome::Unsat);
    }
}
