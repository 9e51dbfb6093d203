//! Small CDCL solver: two watched literals, first-UIP learning with clause
//! minimization, VSIDS, phase saving, Luby restarts and learnt-clause
//! reduction. Correctness fallback for desk-scale instances.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

type Lit = u32;

fn lit(d: i32) -> Lit {
    let v = d.unsigned_abs() - 1;
    2 * v + u32::from(d < 0)
}

fn var(l: Lit) -> usize {
    (l >> 1) as usize
}

const UNDEF: i8 = 0;
const NO_REASON: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Sat(Vec<bool>),
    Unsat,
    Unknown,
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f64,
    deleted: bool,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

/// Max-heap of variables ordered by activity.
struct Heap {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl Heap {
    fn contains(&self, v: usize) -> bool {
        self.pos[v] >= 0
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i] as usize] = i as i32;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && act[self.heap[r] as usize] > act[self.heap[l] as usize] { r } else { l };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as i32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v as u32);
        let i = self.heap.len() - 1;
        self.pos[v] = i as i32;
        self.up(i, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top as usize)
    }
}

pub struct Solver {
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watch>>,
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: Heap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    num_learnts: usize,
    pub conflicts: u64,
}

fn luby(mut i: u64) -> u64 {
    // 1 1 2 1 1 2 4 ...
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

impl Solver {
    pub fn new(num_vars: usize) -> Self {
        let mut s = Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            assign: vec![UNDEF; num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; num_vars],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: Heap { heap: Vec::new(), pos: vec![-1; num_vars] },
            phase: vec![false; num_vars],
            seen: vec![false; num_vars],
            ok: true,
            num_learnts: 0,
            conflicts: 0,
        };
        for v in 0..num_vars {
            s.heap.insert(v, &s.activity);
        }
        s
    }

    pub fn from_clauses(num_vars: usize, clauses: &[Vec<i32>]) -> Self {
        let mut s = Solver::new(num_vars);
        for c in clauses {
            s.add_clause(c);
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.assign.len()
    }

    /// Grow the variable range to at least `n`.
    pub fn reserve_vars(&mut self, n: usize) {
        while self.assign.len() < n {
            let v = self.assign.len();
            self.assign.push(UNDEF);
            self.level.push(0);
            self.reason.push(NO_REASON);
            self.activity.push(0.0);
            self.phase.push(false);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.heap.pos.push(-1);
            self.heap.insert(v, &self.activity);
        }
    }

    fn value(&self, l: Lit) -> i8 {
        let a = self.assign[var(l)];
        if l & 1 == 1 {
            -a
        } else {
            a
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = var(l);
        self.assign[v] = if l & 1 == 1 { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Add a clause in DIMACS literals at decision level 0.
    pub fn add_clause(&mut self, dimacs: &[i32]) {
        if !self.ok {
            return;
        }
        self.backtrack(0);
        let max = dimacs.iter().map(|d| d.unsigned_abs() as usize).max().unwrap_or(0);
        self.reserve_vars(max);
        let mut lits: Vec<Lit> = dimacs.iter().map(|&d| lit(d)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return;
        }
        lits.retain(|&l| self.value(l) != -1);
        if lits.iter().any(|&l| self.value(l) == 1) {
            return;
        }
        match lits.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(lits[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(lits, false);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[(lits[0] ^ 1) as usize].push(Watch { cref, blocker: lits[1] });
        self.watches[(lits[1] ^ 1) as usize].push(Watch { cref, blocker: lits[0] });
        if learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(Clause { lits, learnt, activity: 0.0, deleted: false });
        cref
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[p as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = &mut self.clauses[w.cref as usize];
                if c.deleted {
                    continue;
                }
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                let nw = Watch { cref: w.cref, blocker: first };
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[w.cref as usize].lits.len() {
                    let l = self.clauses[w.cref as usize].lits[k];
                    if self.value(l) != -1 {
                        let c = &mut self.clauses[w.cref as usize];
                        c.lits.swap(1, k);
                        self.watches[(l ^ 1) as usize].push(nw);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == -1 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        if self.heap.contains(v) {
            let i = self.heap.pos[v] as usize;
            self.heap.up(i, &self.activity);
        }
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in &mut self.clauses {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![0];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[k];
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var(self.trail[idx])] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            self.seen[var(pl)] = false;
            path -= 1;
            if path == 0 {
                learnt[0] = pl ^ 1;
                break;
            }
            confl = self.reason[var(pl)];
        }
        // drop literals implied by the rest of the clause
        let marked: Vec<Lit> = learnt.clone();
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(k, &l)| {
                if k == 0 {
                    return true;
                }
                let r = self.reason[var(l)];
                if r == NO_REASON {
                    return true;
                }
                self.clauses[r as usize].lits.iter().any(|&q| var(q) != var(l) && !self.seen[var(q)] && self.level[var(q)] > 0)
            })
            .collect();
        let mut out: Vec<Lit> = learnt.iter().zip(&keep).filter(|(_, &k)| k).map(|(&l, _)| l).collect();
        for l in marked {
            self.seen[var(l)] = false;
        }
        let bt = if out.len() == 1 {
            0
        } else {
            let mut m = 1;
            for k in 2..out.len() {
                if self.level[var(out[k])] > self.level[var(out[m])] {
                    m = k;
                }
            }
            out.swap(1, m);
            self.level[var(out[1])]
        };
        (out, bt)
    }

    fn backtrack(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = var(l);
            self.phase[v] = l & 1 == 0;
            self.assign[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn locked(&self, cref: usize) -> bool {
        let l = self.clauses[cref].lits[0];
        self.value(l) == 1 && self.reason[var(l)] == cref as u32
    }

    fn reduce_db(&mut self) {
        let mut learnts: Vec<usize> =
            (0..self.clauses.len()).filter(|&k| self.clauses[k].learnt && !self.clauses[k].deleted && self.clauses[k].lits.len() > 2).collect();
        learnts.sort_by(|&a, &b| self.clauses[a].activity.total_cmp(&self.clauses[b].activity));
        let half = learnts.len() / 2;
        for &k in &learnts[..half] {
            if !self.locked(k) {
                self.clauses[k].deleted = true;
                self.num_learnts -= 1;
            }
        }
        for ws in &mut self.watches {
            ws.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assign[v] == UNDEF {
                return Some(2 * v as u32 + u32::from(!self.phase[v]));
            }
        }
        None
    }

    /// Solve with an optional deadline and cancellation flag.
    pub fn solve(&mut self, deadline: Option<Instant>, cancel: Option<&AtomicBool>) -> Outcome {
        if !self.ok {
            return Outcome::Unsat;
        }
        self.backtrack(0);
        if self.propagate().is_some() {
            self.ok = false;
            return Outcome::Unsat;
        }
        let mut restart = 0u64;
        let mut max_learnts = (self.clauses.len() / 3).max(5000) as f64;
        loop {
            let budget = 100 * luby(restart);
            restart += 1;
            let mut local = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    self.conflicts += 1;
                    local += 1;
                    if self.decision_level() == 0 {
                        self.ok = false;
                        return Outcome::Unsat;
                    }
                    let (learnt, bt) = self.analyze(confl);
                    self.backtrack(bt);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], NO_REASON);
                    } else {
                        let first = learnt[0];
                        let cref = self.attach(learnt, true);
                        self.bump_clause(cref);
                        self.enqueue(first, cref);
                    }
                    self.var_inc /= 0.95;
                    self.cla_inc /= 0.999;
                    if self.conflicts.is_multiple_of(256)
                        && (cancel.is_some_and(|c| c.load(Ordering::Relaxed)) || deadline.is_some_and(|d| Instant::now() >= d)) {
                            self.backtrack(0);
                            return Outcome::Unknown;
                        }
                } else {
                    if local >= budget {
                        self.backtrack(0);
                        break;
                    }
                    if self.num_learnts as f64 >= max_learnts + self.trail.len() as f64 {
                        self.reduce_db();
                        max_learnts *= 1.1;
                    }
                    match self.pick_branch() {
                        None => {
                            let model = self.assign.iter().map(|&a| a == 1).collect();
                            self.backtrack(0);
                            return Outcome::Sat(model);
                        }
                        Some(l) => {
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(l, NO_REASON);
                        }
                    }
                }
            }
        }
    }
}

/// Check a model against clauses (DIMACS literals, model indexed from 0).
pub fn satisfies(clauses: &[Vec<i32>], model: &[bool]) -> bool {
    clauses.iter().all(|c| {
        c.iter().any(|&l| {
            let v = l.unsigned_abs() as usize - 1;
            v < model.len() && model[v] == (l > 0)
        })
    })
}
