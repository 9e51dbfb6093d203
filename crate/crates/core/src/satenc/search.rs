//! Depth search: binary search over `d` with concurrent probes.
//!
//! Padding a circuit with a gate and its inverse shows that SAT at `d`
//! implies SAT at `d + 2`, but nothing links `d` and `d + 1`. The search
//! therefore brackets like a monotone binary search and then confirms the
//! two depths below its answer; UNSAT at both rules out every smaller depth.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;

use super::{decode, encode, solve, Outcome, SolveOptions};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::somat::TransferMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeStatus {
    Sat,
    Unsat,
    Unknown,
    /// Below the scale bound `k_max`; UNSAT without solving.
    Trivial,
}

impl ProbeStatus {
    pub fn name(self) -> &'static str {
        match self {
            ProbeStatus::Sat => "SAT",
            ProbeStatus::Unsat => "UNSAT",
            ProbeStatus::Unknown => "UNKNOWN",
            ProbeStatus::Trivial => "UNSAT(trivial)",
        }
    }

    fn is_unsat(self) -> bool {
        matches!(self, ProbeStatus::Unsat | ProbeStatus::Trivial)
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub solve: SolveOptions,
    pub parallel_layers: bool,
    /// Probes run concurrently per bisection round.
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { solve: SolveOptions::default(), parallel_layers: true, jobs: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct SearchRecord {
    /// Proven minimal depth.
    pub optimal: Option<usize>,
    /// Shallowest depth with a verified circuit.
    pub best: Option<(usize, Circuit)>,
    /// Every depth probed (or ruled out) and its verdict.
    pub probes: BTreeMap<usize, ProbeStatus>,
}

impl SearchRecord {
    /// Largest depth below which every depth is known UNSAT.
    pub fn lower_bound(&self) -> usize {
        (0..).find(|d| !self.probes.get(d).is_some_and(|s| s.is_unsat())).expect("finite")
    }
}

struct Prober<'a> {
    q: &'a TransferMatrix,
    opts: &'a SearchOptions,
    record: SearchRecord,
}

impl Prober<'_> {
    fn known(&self, d: usize) -> Option<ProbeStatus> {
        if (d as u32) < self.q.k_max() {
            return Some(ProbeStatus::Trivial);
        }
        self.record.probes.get(&d).copied()
    }

    fn store(&mut self, d: usize, res: Result<(ProbeStatus, Option<Circuit>)>) -> Result<()> {
        let (st, c) = res?;
        self.record.probes.insert(d, st);
        if let Some(c) = c {
            if self.record.best.as_ref().is_none_or(|(b, _)| d < *b) {
                self.record.best = Some((d, c));
            }
        }
        Ok(())
    }

    /// Probe a set of depths concurrently. Once a depth is SAT, deeper
    /// probes are cancelled; once one is UNSAT, shallower probes are.
    fn probe_all(&mut self, depths: &[usize]) -> Result<()> {
        let todo: Vec<usize> = depths.iter().copied().filter(|&d| self.known(d).is_none()).collect();
        if todo.is_empty() {
            return Ok(());
        }
        if todo.len() == 1 {
            let r = probe(self.q, todo[0], self.opts, None);
            return self.store(todo[0], r);
        }
        let flags: Vec<AtomicBool> = todo.iter().map(|_| AtomicBool::new(false)).collect();
        let (tx, rx) = mpsc::channel();
        let (q, opts) = (self.q, self.opts);
        let mut results = Vec::new();
        std::thread::scope(|s| {
            for (k, &d) in todo.iter().enumerate() {
                let tx = tx.clone();
                let flag = &flags[k];
                s.spawn(move || {
                    let _ = tx.send((k, probe(q, d, opts, Some(flag))));
                });
            }
            drop(tx);
            for (k, r) in rx {
                match &r {
                    Ok((ProbeStatus::Sat, _)) => {
                        for (m, &e) in todo.iter().enumerate() {
                            if e > todo[k] {
                                flags[m].store(true, Ordering::Relaxed);
                            }
                        }
                    }
                    Ok((st, _)) if st.is_unsat() => {
                        for (m, &e) in todo.iter().enumerate() {
                            if e < todo[k] {
                                flags[m].store(true, Ordering::Relaxed);
                            }
                        }
                    }
                    _ => {}
                }
                results.push((k, r));
            }
        });
        for (k, r) in results {
            // a probe stopped by bracket closure carries no information
            if flags[k].load(Ordering::Relaxed) && matches!(r, Ok((ProbeStatus::Unknown, _))) {
                continue;
            }
            self.store(todo[k], r)?;
        }
        Ok(())
    }

    fn status(&self, d: usize) -> Option<ProbeStatus> {
        self.known(d)
    }
}

/// Solve one depth and decode any model.
pub fn probe(
    q: &TransferMatrix,
    d: usize,
    opts: &SearchOptions,
    cancel: Option<&AtomicBool>,
) -> Result<(ProbeStatus, Option<Circuit>)> {
    if (d as u32) < q.k_max() {
        return Ok((ProbeStatus::Trivial, None));
    }
    let inst = encode(q, d, opts.parallel_layers)?;
    Ok(match solve(&inst, &opts.solve, cancel)? {
        Outcome::Sat(m) => (ProbeStatus::Sat, Some(decode(&m, &inst.varmap, q)?)),
        Outcome::Unsat => (ProbeStatus::Unsat, None),
        Outcome::Unknown => (ProbeStatus::Unknown, None),
    })
}

/// Find the minimal depth of a circuit realizing `q`, up to `d_max`.
pub fn search_depth(q: &TransferMatrix, d_max: usize, opts: &SearchOptions) -> Result<SearchRecord> {
    if (d_max as u32) < q.k_max() {
        return Err(Error::Domain(format!("d_max = {d_max} is below k_max = {}", q.k_max())));
    }
    let mut p = Prober { q, opts, record: SearchRecord { optimal: None, best: None, probes: BTreeMap::new() } };
    p.probe_all(&[0])?;
    if p.status(0) == Some(ProbeStatus::Sat) {
        p.record.optimal = Some(0);
        return Ok(p.record);
    }
    let jobs = opts.jobs.max(1);
    let mut lo = (q.k_max() as usize).max(1);
    let mut hi = d_max;
    // bisection: [lo, hi] holds the answer if the SAT set were upward closed
    while lo <= hi {
        if p.record.best.as_ref().is_some_and(|(b, _)| *b == lo) {
            break;
        }
        let span = hi - lo + 1;
        let k = jobs.min(span);
        let points: Vec<usize> = (1..=k).map(|i| lo + (span * i) / (k + 1)).map(|d| d.min(hi)).collect();
        p.probe_all(&points)?;
        let mut moved = false;
        for &d in &points {
            match p.status(d) {
                Some(ProbeStatus::Sat) if d <= hi => {
                    hi = d.saturating_sub(1);
                    moved = true;
                }
                Some(s) if s != ProbeStatus::Sat && d >= lo && d <= hi => {
                    lo = d + 1;
                    moved = true;
                }
                _ => {}
            }
        }
        if !moved {
            break;
        }
    }
    // confirm: SAT at d, and UNSAT at d−1 and d−2 (padding carries UNSAT downwards by 2)
    while let Some(d) = p.record.best.as_ref().map(|(d, _)| *d) {
        let below: Vec<usize> = [d.checked_sub(1), d.checked_sub(2)].into_iter().flatten().collect();
        p.probe_all(&below)?;
        if below.iter().any(|&e| p.status(e) == Some(ProbeStatus::Sat)) {
            continue;
        }
        if below.iter().all(|&e| p.status(e).is_some_and(ProbeStatus::is_unsat)) {
            p.record.optimal = Some(d);
        }
        break;
    }
    for d in 0..(q.k_max() as usize).min(d_max + 1) {
        p.record.probes.entry(d).or_insert(ProbeStatus::Trivial);
    }
    Ok(p.record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::somat::{eval_product, GateKind, GeneratorId};

    #[test]
    fn simple_targets() {
        let t = TransferMatrix::generator(1, GeneratorId::new(GateKind::Ttil, 1)).unwrap();
        let r = search_depth(&t, 4, &SearchOptions::default()).unwrap();
        assert_eq!(r.optimal, Some(1));
        let r = search_depth(&TransferMatrix::identity(2), 3, &SearchOptions::default()).unwrap();
        assert_eq!(r.optimal, Some(0));
        assert!(search_depth(&t, 0, &SearchOptions::default()).is_err());
    }

    #[test]
    fn concurrent_probes_agree() {
        use GateKind::*;
        let w = [
            GeneratorId::new(Ttil, 1),
            GeneratorId::new(Rtil, 1),
            GeneratorId::new(Ttil, 2),
            GeneratorId::new(Stil, 1),
        ];
        let q = eval_product(2, &w).unwrap();
        let one = search_depth(&q, 6, &SearchOptions::default()).unwrap();
        let three = search_depth(&q, 6, &SearchOptions { jobs: 3, ..SearchOptions::default() }).unwrap();
        assert!(one.optimal.is_some());
        assert_eq!(one.optimal, three.optimal);
        let (d, c) = one.best.unwrap();
        assert_eq!(c.depth(), d);
        assert!(d <= 3);
    }
}
