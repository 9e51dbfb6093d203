//! Approximate synthesis of floating SO(2n) targets.
//!
//! The target is split into adjacent-plane rotations, each rotation angle is
//! approximated inside an SU(2) copy by a word over `{T, W}`, and every word
//! is mapped onto discrete matchgates.
//!
//! Letters: `T = exp(iπZ/8)`, `W = i(Y+Z)/√2`. Odd planes host `R^z(θ)`
//! targets `exp(iθZ/2)`; even planes host `R^xx(θ)` targets `exp(iθX/2)`
//! under `Z → Z_q`, `X → X_q X_{q+1}`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::somat::{GateKind, GeneratorId};
use crate::spinrep::{gen_gates, op_norm_dist, orthogonality_error, DenseUnitary, Gate, DEFAULT_QUBIT_CAP};

/// Rotation by `theta` in coordinates `(plane, plane+1)` (1-based), with
/// the transfer block `[[cos θ, sin θ], [−sin θ, cos θ]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarRotation {
    pub plane: usize,
    pub theta: f64,
}

impl PlanarRotation {
    pub fn is_z(&self) -> bool {
        self.plane % 2 == 1
    }

    /// The continuous matchgate this rotation is the transfer matrix of.
    pub fn gate(&self) -> Gate {
        if self.is_z() {
            Gate::Rz { q: self.plane.div_ceil(2), theta: self.theta }
        } else {
            Gate::Rxx { q: self.plane / 2, theta: self.theta }
        }
    }

    /// Left-multiply a float matrix by this rotation.
    pub fn apply_left(&self, m: &mut DMatrix<f64>) {
        let (i, k) = (self.plane - 1, self.plane);
        let (c, s) = (self.theta.cos(), self.theta.sin());
        for j in 0..m.ncols() {
            let (x, y) = (m[(i, j)], m[(k, j)]);
            m[(i, j)] = c * x + s * y;
            m[(k, j)] = -s * x + c * y;
        }
    }
}

fn canonical_angle(t: f64) -> f64 {
    let mut t = t % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Time-ordered rotations whose product `P_m ⋯ P_1` reconstructs `qf`.
pub fn givens_decompose(qf: &DMatrix<f64>) -> Result<Vec<PlanarRotation>> {
    let d = qf.nrows();
    if d != qf.ncols() || !d.is_multiple_of(2) || d == 0 {
        return Err(Error::Dimension(format!("{}×{} is not an SO(2n) size", qf.nrows(), qf.ncols())));
    }
    let err = orthogonality_error(qf);
    if err > 1e-9 {
        return Err(Error::NotOrthogonal(format!("QᵀQ − I = {err:e}")));
    }
    if qf.determinant() < 0.0 {
        return Err(Error::Reflection);
    }
    let mut w = qf.clone();
    let mut ops = Vec::new();
    for j in 0..d - 1 {
        for i in (j..d - 1).rev() {
            let (x, y) = (w[(i, j)], w[(i + 1, j)]);
            if y.abs() < 1e-15 && (i > j || x >= 0.0) {
                continue;
            }
            let g = PlanarRotation { plane: i + 1, theta: y.atan2(x) };
            g.apply_left(&mut w);
            ops.push(g);
        }
    }
    Ok(ops
        .into_iter()
        .rev()
        .map(|g| PlanarRotation { plane: g.plane, theta: canonical_angle(-g.theta) })
        .filter(|g| g.theta.abs() >= 1e-12)
        .collect())
}

/// Float product `P_m ⋯ P_1` of time-ordered rotations.
pub fn rotations_product(n: usize, rots: &[PlanarRotation]) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n, 2 * n);
    for r in rots {
        r.apply_left(&mut m);
    }
    m
}

/// Element `[[a, b], [−b*, a*]]` of SU(2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2 {
    pub a: C64,
    pub b: C64,
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 { a: C64 { re: 1.0, im: 0.0 }, b: C64 { re: 0.0, im: 0.0 } };

    pub fn mul(&self, o: &Su2) -> Su2 {
        Su2 { a: self.a * o.a - self.b * o.b.conj(), b: self.a * o.b + self.b * o.a.conj() }
    }

    pub fn adjoint(&self) -> Su2 {
        Su2 { a: self.a.conj(), b: -self.b }
    }

    pub fn neg(&self) -> Su2 {
        Su2 { a: -self.a, b: -self.b }
    }

    fn quat(&self) -> [f64; 4] {
        [self.a.re, self.a.im, self.b.re, self.b.im]
    }

    fn dot(&self, o: &Su2) -> f64 {
        let (p, q) = (self.quat(), o.quat());
        p.iter().zip(q).map(|(x, y)| x * y).sum()
    }

    /// `exp(iθZ/2)`.
    pub fn rz(theta: f64) -> Su2 {
        Su2 { a: C64::from_polar(1.0, theta / 2.0), b: C64::new(0.0, 0.0) }
    }

    /// `exp(iθX/2)`.
    pub fn rx(theta: f64) -> Su2 {
        Su2 { a: C64::new((theta / 2.0).cos(), 0.0), b: C64::new(0.0, (theta / 2.0).sin()) }
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [[self.a, self.b], [-self.b.conj(), self.a.conj()]]
    }

    /// Operator-norm distance `‖U − V‖`.
    pub fn op_dist(&self, o: &Su2) -> f64 {
        // eigenphases ±φ of U†V: ‖U − V‖ = 2 sin(φ/2) = |p − q| for quaternions p, q
        self.quat_dist(o, 1.0)
    }

    fn quat_dist(&self, o: &Su2, sign: f64) -> f64 {
        let (p, q) = (self.quat(), o.quat());
        p.iter().zip(q).map(|(x, y)| (x - sign * y).powi(2)).sum::<f64>().sqrt()
    }

    /// Phase-insensitive distance `‖U⊗U* − V⊗V*‖ = 2|sin φ|`.
    pub fn adjoint_dist(&self, o: &Su2) -> f64 {
        // 2 sin φ = |p − q|·|p + q|
        self.quat_dist(o, 1.0) * self.quat_dist(o, -1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    T,
    Tinv,
    W,
    Winv,
}

impl Letter {
    pub fn su2(self) -> Su2 {
        let e = C64::from_polar(1.0, PI / 8.0);
        match self {
            Letter::T => Su2 { a: e, b: C64::new(0.0, 0.0) },
            Letter::Tinv => Su2 { a: e.conj(), b: C64::new(0.0, 0.0) },
            Letter::W => Su2 { a: C64::new(0.0, FRAC_1_SQRT_2), b: C64::new(FRAC_1_SQRT_2, 0.0) },
            Letter::Winv => Letter::W.su2().adjoint(),
        }
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::T => Letter::Tinv,
            Letter::Tinv => Letter::T,
            Letter::W => Letter::Winv,
            Letter::Winv => Letter::W,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Letter::T => "T",
            Letter::Tinv => "Tinv",
            Letter::W => "W",
            Letter::Winv => "Winv",
        }
    }
}

/// Letters read as a matrix product `L₁ L₂ ⋯ L_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Su2Word {
    pub letters: Vec<Letter>,
    pub unitary: Su2,
}

impl Su2Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        let unitary = letters.iter().fold(Su2::IDENTITY, |u, l| u.mul(&l.su2()));
        Su2Word { letters, unitary }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn t_count(&self) -> usize {
        self.letters.iter().filter(|l| matches!(l, Letter::T | Letter::Tinv)).count()
    }

    /// Parse a space- or comma-separated letter list, e.g. `"T W Tinv"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            letters.push(match tok {
                "T" => Letter::T,
                "Tinv" => Letter::Tinv,
                "W" => Letter::W,
                "Winv" => Letter::Winv,
                _ => return Err(Error::Parse(format!("unknown letter {tok:?}; expected T, Tinv, W or Winv"))),
            });
        }
        Ok(Su2Word::new(letters))
    }
}

impl fmt::Display for Su2Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.letters.iter().map(|l| l.name()).collect();
        f.write_str(&names.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// Smallest accepted target precision.
    pub eps_floor: f64,
    /// Number of table elements the search may use (at most [`TABLE_SIZE`]).
    pub max_table: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { eps_floor: 5e-3, max_table: TABLE_SIZE }
    }
}

/// Distinct projective SU(2) elements held in the shared search table.
pub const TABLE_SIZE: usize = 400_000;

/// Distinct elements in order of first appearance in a breadth-first walk
/// over right multiplication by `T`, `Tinv` and `W`; `W⁻¹ = −W` is the same
/// projective element as `W`.
struct Table {
    u: Vec<Su2>,
    parent: Vec<u32>,
    letter: Vec<Letter>,
    depth: Vec<u16>,
}

const STEPS: [Letter; 3] = [Letter::T, Letter::Tinv, Letter::W];

fn projective_key(u: &Su2) -> [i64; 4] {
    let q = u.quat();
    let lead = q.iter().copied().find(|x| x.abs() > 1e-6).unwrap_or(1.0);
    let s = if lead < 0.0 { -1.0 } else { 1.0 };
    q.map(|x| (s * x * 1e7).round() as i64)
}

impl Table {
    fn build(size: usize) -> Self {
        let mut t = Table { u: vec![Su2::IDENTITY], parent: vec![u32::MAX], letter: vec![Letter::T], depth: vec![0] };
        let mut seen: HashMap<[i64; 4], ()> = HashMap::new();
        seen.insert(projective_key(&Su2::IDENTITY), ());
        let mut i = 0;
        while t.u.len() < size && i < t.u.len() {
            for l in STEPS {
                let v = t.u[i].mul(&l.su2());
                if seen.insert(projective_key(&v), ()).is_some() || t.u.len() >= size {
                    continue;
                }
                t.u.push(v);
                t.parent.push(i as u32);
                t.letter.push(l);
                t.depth.push(t.depth[i] + 1);
            }
            i += 1;
        }
        t
    }

    fn word(&self, mut i: usize) -> Vec<Letter> {
        let mut out = Vec::new();
        while self.parent[i] != u32::MAX {
            out.push(self.letter[i]);
            i = self.parent[i] as usize;
        }
        out.reverse();
        out
    }
}

type Cell = [i64; 4];

/// Both signs of every table element bucketed by a cubic grid of side `h`,
/// sorted by (cell, index).
struct Grid {
    h: f64,
    entries: Vec<(Cell, u32)>,
    runs: HashMap<Cell, (u32, u32)>,
}

impl Grid {
    fn build(table: &Table, h: f64) -> Self {
        let mut entries = Vec::with_capacity(2 * table.u.len());
        for (i, u) in table.u.iter().enumerate() {
            for q in [u.quat(), u.neg().quat()] {
                entries.push((q.map(|x| (x / h).floor() as i64), i as u32));
            }
        }
        entries.sort_unstable();
        let mut runs: HashMap<Cell, (u32, u32)> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            runs.entry(e.0).or_insert((i as u32, i as u32)).1 = i as u32 + 1;
        }
        Grid { h, entries, runs }
    }

    /// Indices in `range` from cells within half a cell of `p` per coordinate.
    fn near(&self, p: [f64; 4], range: &std::ops::Range<u32>, mut f: impl FnMut(u32)) {
        let scaled = p.map(|x| x / self.h);
        let base = scaled.map(|x| x.floor() as i64);
        let dir = scaled.map(|x| if x - x.floor() < 0.5 { -1 } else { 1 });
        for mask in 0..16usize {
            let mut key = base;
            for (c, k) in key.iter_mut().enumerate() {
                if mask >> c & 1 == 1 {
                    *k += dir[c];
                }
            }
            let Some(&(lo, hi)) = self.runs.get(&key) else { continue };
            let run = &self.entries[lo as usize..hi as usize];
            let start = run.partition_point(|e| e.1 < range.start);
            for e in &run[start..] {
                if e.1 >= range.end {
                    break;
                }
                f(e.1);
            }
        }
    }
}

struct Shared {
    table: Table,
    grids: Mutex<HashMap<i32, Arc<Grid>>>,
}

fn shared() -> &'static Shared {
    static SHARED: OnceLock<Shared> = OnceLock::new();
    SHARED.get_or_init(|| Shared { table: Table::build(TABLE_SIZE), grids: Mutex::new(HashMap::new()) })
}

impl Shared {
    /// Grid with side `2^e ≥ 1.02·eps`: any match lies within half a cell
    /// of the query point in every coordinate.
    fn grid(&self, eps: f64) -> Arc<Grid> {
        let e = (1.02 * eps).log2().ceil() as i32;
        let mut grids = self.grids.lock().expect("grid cache lock");
        grids.entry(e).or_insert_with(|| Arc::new(Grid::build(&self.table, 2f64.powi(e)))).clone()
    }
}

/// Word whose unitary is within adjoint distance `eps` of `target`, with the
/// overall sign chosen so the operator-norm error is the smaller one.
///
/// Meet in the middle: left factors `A` from a growing prefix of a shared
/// breadth-first table are paired with right factors `B` from a longer prefix
/// through a spatial hash of unit quaternions (adjoint `ε` corresponds to a
/// quaternion distance of about `ε/2`).
pub fn su2_search(target: &Su2, eps: f64, cfg: &SearchConfig) -> Result<(Su2Word, f64)> {
    let cap = cfg.max_table.min(TABLE_SIZE);
    if !(eps >= cfg.eps_floor) {
        return Err(Error::SearchExhausted { cap, best: f64::NAN });
    }
    let sh = shared();
    let grid = sh.grid(eps);
    let table = &sh.table;
    let mut best_seen = f64::INFINITY;
    let (mut la_old, mut lb_old) = (0u32, 0u32);
    let mut la = 4u32;
    loop {
        let la_now = la.min(cap as u32);
        let lb_now = la.saturating_mul(256).min(cap as u32);
        let mut best: Option<(usize, usize, usize)> = None;
        for a in 0..la_now {
            let range = if a < la_old { lb_old..lb_now } else { 0..lb_now };
            if range.is_empty() {
                continue;
            }
            let ua = table.u[a as usize];
            let p = ua.adjoint().mul(target);
            grid.near(p.quat(), &range, |b| {
                let err = ua.mul(&table.u[b as usize]).adjoint_dist(target);
                best_seen = best_seen.min(err);
                let len = (table.depth[a as usize] + table.depth[b as usize]) as usize;
                if err <= eps && best.is_none_or(|(l, _, _)| len < l) {
                    best = Some((len, a as usize, b as usize));
                }
            });
        }
        if let Some((_, a, b)) = best {
            let mut letters = table.word(a);
            letters.extend(table.word(b));
            return Ok(finish(reduce(&letters), target));
        }
        if la_now as usize >= cap && lb_now as usize >= cap {
            return Err(Error::SearchExhausted { cap, best: best_seen });
        }
        (la_old, lb_old) = (la_now, lb_now);
        la = la.saturating_mul(4);
    }
}

/// Merge adjacent T-runs modulo 8 and cancel `W W` pairs (which equal `−I`).
fn reduce(letters: &[Letter]) -> Vec<Letter> {
    // runs: exponent between consecutive W's
    let mut exps: Vec<i32> = vec![0];
    for &l in letters {
        match l {
            Letter::T => *exps.last_mut().expect("non-empty") += 1,
            Letter::Tinv => *exps.last_mut().expect("non-empty") -= 1,
            Letter::W | Letter::Winv => {
                // Winv = −W up to sign
                let e = *exps.last().expect("non-empty");
                if exps.len() > 1 && e.rem_euclid(8) == 0 {
                    exps.pop();
                    let carry = e;
                    *exps.last_mut().expect("non-empty") += carry;
                } else {
                    exps.push(0);
                }
            }
        }
    }
    let mut out = Vec::new();
    for (i, e) in exps.into_iter().enumerate() {
        if i > 0 {
            out.push(Letter::W);
        }
        let r = e.rem_euclid(8);
        let (l, count) = if r > 4 { (Letter::Tinv, 8 - r) } else { (Letter::T, r) };
        out.extend(std::iter::repeat_n(l, count as usize));
    }
    out
}

fn finish(letters: Vec<Letter>, target: &Su2) -> (Su2Word, f64) {
    let mut word = Su2Word::new(letters);
    if word.unitary.dot(target) < 0.0 {
        word.letters.extend([Letter::W, Letter::W]);
        word = Su2Word::new(word.letters);
    }
    let err = word.unitary.adjoint_dist(target);
    (word, err)
}

/// Host qubit and helper qubit of a rotation's SU(2) copy.
fn host(rot: &PlanarRotation, n: usize) -> (usize, Option<usize>) {
    if rot.is_z() {
        let q = rot.plane.div_ceil(2);
        let helper = if q < n { Some(q + 1) } else if q > 1 { Some(q - 1) } else { None };
        (q, helper)
    } else {
        (rot.plane / 2, Some(rot.plane / 2 + 1))
    }
}

/// Time-ordered matchgates realizing `word` inside the SU(2) copy hosting
/// `rot`. `T ↦ T̄_q`, `W ↦ R^xx(π/2)·S̄_q²`.
pub fn map_word(word: &Su2Word, rot: &PlanarRotation, n: usize) -> Result<Vec<GeneratorId>> {
    let max_plane = 2 * n - 1;
    if rot.plane == 0 || rot.plane > max_plane {
        return Err(Error::Range(format!("plane {} on {n} qubits", rot.plane)));
    }
    let (q, helper) = host(rot, n);
    let bond = helper.map(|h| h.min(q));
    let needs_w = word.letters.iter().any(|l| matches!(l, Letter::W | Letter::Winv));
    let bond = match (bond, needs_w) {
        (Some(b), _) => b,
        (None, true) => return Err(Error::Range("a W letter needs a neighbouring qubit".into())),
        (None, false) => 0,
    };
    let g = |k: GateKind, s: usize| GeneratorId::new(k, s);
    let mut out = Vec::new();
    for &l in word.letters.iter().rev() {
        match l {
            Letter::T => out.push(g(GateKind::Ttil, q)),
            Letter::Tinv => out.push(g(GateKind::TtilInv, q)),
            Letter::W => out.extend([g(GateKind::Stil, q), g(GateKind::Stil, q), g(GateKind::Rtil, bond)]),
            Letter::Winv => out.extend([g(GateKind::RtilInv, bond), g(GateKind::StilInv, q), g(GateKind::StilInv, q)]),
        }
    }
    Ok(out)
}

/// SU(2) element a rotation is approximated against.
pub fn rotation_target(rot: &PlanarRotation) -> Su2 {
    if rot.is_z() { Su2::rz(rot.theta) } else { Su2::rx(rot.theta) }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LedgerRow {
    pub n: usize,
    pub m: usize,
    pub eps_budget: f64,
    pub eps_loc: f64,
    pub eps_glob: f64,
    pub rel_gap: f64,
}

#[derive(Clone, Debug)]
pub struct RotationResult {
    pub rotation: PlanarRotation,
    pub word: Su2Word,
    pub adjoint_error: f64,
    pub op_error: f64,
    pub gates: Vec<GeneratorId>,
}

#[derive(Clone, Debug)]
pub struct ApproxResult {
    pub circuit: Circuit,
    pub rotations: Vec<RotationResult>,
    pub ledger: LedgerRow,
}

/// A single qubit has no neighbour for `W`, so only powers of `T` are
/// reachable; `T⁸ = −I` covers both signs.
fn t_power_search(target: &Su2, eps: f64) -> Result<(Su2Word, f64)> {
    let best = (0..16)
        .map(|k| Su2Word::new(vec![Letter::T; k]))
        .min_by(|a, b| a.unitary.op_dist(target).total_cmp(&b.unitary.op_dist(target)))
        .expect("nonempty");
    let err = best.unitary.adjoint_dist(target);
    if err > eps {
        return Err(Error::SearchExhausted { cap: 16, best: err });
    }
    Ok((best, err))
}

/// Approximate `qf` with a per-rotation adjoint budget of `eps_total / m`.
/// The global error compares the compiled unitary with the product of the
/// exact rotation unitaries in operator norm (only for `n ≤ 6`; NaN above).
pub fn approx_synthesize(qf: &DMatrix<f64>, eps_total: f64, cfg: &SearchConfig) -> Result<ApproxResult> {
    let n = qf.nrows() / 2;
    let rots = givens_decompose(qf)?;
    let m = rots.len();
    let eps = if m == 0 { eps_total } else { eps_total / m as f64 };
    let results: Vec<RotationResult> = rots
        .par_iter()
        .map(|rot| {
            let target = rotation_target(rot);
            let (word, adjoint_error) = if n == 1 { t_power_search(&target, eps)? } else { su2_search(&target, eps, cfg)? };
            let op_error = word.unitary.op_dist(&target);
            let gates = map_word(&word, rot, n)?;
            Ok(RotationResult { rotation: *rot, word, adjoint_error, op_error, gates })
        })
        .collect::<Result<_>>()?;
    let all: Vec<GeneratorId> = results.iter().flat_map(|r| r.gates.iter().copied()).collect();
    let circuit = Circuit::from_gates(n, &all).with_provenance("approx");
    let eps_loc: f64 = results.iter().map(|r| r.op_error).sum();
    let eps_glob = if n <= DEFAULT_QUBIT_CAP {
        let exact: Vec<Gate> = rots.iter().map(|r| r.gate()).collect();
        let u_target = DenseUnitary::from_gates(n, &exact, DEFAULT_QUBIT_CAP)?;
        let u_comp = DenseUnitary::from_gates(n, &gen_gates(&all), DEFAULT_QUBIT_CAP)?;
        op_norm_dist(&u_target, &u_comp)?
    } else {
        f64::NAN
    };
    let rel_gap = if eps_loc > 0.0 { (eps_loc - eps_glob) / eps_loc } else { 0.0 };
    Ok(ApproxResult { circuit, rotations: results, ledger: LedgerRow { n, m, eps_budget: eps_total, eps_loc, eps_glob, rel_gap } })
}

pub fn write_ledger<W: Write>(out: W, rows: &[LedgerRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Internal(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ledger_file(path: &Path, rows: &[LedgerRow]) -> Result<()> {
    write_ledger(std::fs::File::create(path)?, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinrep::transfer_matrix;
    use crate::targets::random_haar_so;

    #[test]
    fn single_qubit_uses_t_powers() {
        let cfg = SearchConfig::default();
        let q = rotations_product(1, &[PlanarRotation { plane: 1, theta: 3.0 * PI / 4.0 }]);
        let r = approx_synthesize(&q, 1e-9, &cfg).unwrap();
        assert_eq!(r.circuit.t_count(), 3);
        let q = rotations_product(1, &[PlanarRotation { plane: 1, theta: PI / 8.0 }]);
        assert!(matches!(approx_synthesize(&q, 0.1, &cfg), Err(Error::SearchExhausted { cap: 16, .. })));
    }

    #[test]
    fn givens_reconstructs() {
        assert!(givens_decompose(&DMatrix::identity(4, 4)).unwrap().is_empty());
        let one = rotations_product(2, &[PlanarRotation { plane: 1, theta: 0.3 }]);
        let r = givens_decompose(&one).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].plane, 1);
        assert!((r[0].theta - 0.3).abs() < 1e-12);
        for seed in 0..5 {
            let q = random_haar_so(4, seed);
            let rots = givens_decompose(&q).unwrap();
            assert!(rots.len() <= 28);
            assert!((rotations_product(4, &rots) - &q).abs().max() < 1e-9);
        }
        let mut refl = DMatrix::<f64>::identity(2, 2);
        refl[(0, 0)] = -1.0;
        assert!(matches!(givens_decompose(&refl), Err(Error::Reflection)));
    }

    #[test]
    fn rotation_transfer_matches_gate() {
        for (plane, theta) in [(1, 0.4), (2, -1.1), (3, 2.0)] {
            let r = PlanarRotation { plane, theta };
            let u = DenseUnitary::from_gates(2, &[r.gate()], 6).unwrap();
            assert!((transfer_matrix(&u).unwrap() - rotations_product(2, &[r])).abs().max() < 1e-12);
        }
    }

    #[test]
    fn letters_and_trivial_searches() {
        let w = Letter::W.su2();
        assert!(w.mul(&w).op_dist(&Su2::IDENTITY.neg()) < 1e-12);
        let t8 = (0..8).fold(Su2::IDENTITY, |u, _| u.mul(&Letter::T.su2()));
        assert!(t8.op_dist(&Su2::IDENTITY.neg()) < 1e-12);
        let cfg = SearchConfig::default();
        let (word, err) = su2_search(&Letter::T.su2(), 0.01, &cfg).unwrap();
        assert_eq!(word.to_string(), "T");
        assert!(err < 1e-12);
        let (word, _) = su2_search(&Letter::W.su2(), 0.01, &cfg).unwrap();
        assert_eq!(word.to_string(), "W");
        // e^{−iπ/8}·diag(1, e^{iπ/4}) = T⁻¹ in this letter convention
        let t_gate = Su2 { a: C64::from_polar(1.0, -PI / 8.0), b: C64::new(0.0, 0.0) };
        assert_eq!(su2_search(&t_gate, 0.01, &cfg).unwrap().0.to_string(), "Tinv");
    }

    #[test]
    fn search_meets_precision() {
        let cfg = SearchConfig::default();
        for (theta, eps) in [(0.1, 0.05), (1.234, 0.01), (-2.5, 0.005)] {
            let target = Su2::rz(theta);
            let (word, err) = su2_search(&target, eps, &cfg).unwrap();
            assert!(err <= eps);
            assert!((word.unitary.adjoint_dist(&target) - err).abs() < 1e-12);
            assert!(word.unitary.op_dist(&target) <= err + 1e-12);
        }
        assert!(matches!(su2_search(&Su2::rz(0.3), 1e-5, &cfg), Err(Error::SearchExhausted { .. })));
    }

    /// `CNOT_{c→t} (V on qubit q) CNOT_{c→t}` with `c = q`.
    fn embedded(n: usize, v: &Su2, q: usize, t: usize) -> DMatrix<C64> {
        let dim = 1 << n;
        let (bq, bt) = (1 << (n - q), 1 << (n - t));
        let m = v.matrix();
        let mut local = DMatrix::<C64>::zeros(dim, dim);
        for s in 0..dim {
            let i = usize::from(s & bq != 0);
            for j in 0..2 {
                let r = if j == 1 { s | bq } else { s & !bq };
                local[(r, s)] += m[j][i];
            }
        }
        let cnot = DMatrix::<C64>::from_fn(dim, dim, |r, c| {
            let img = if c & bq != 0 { c ^ bt } else { c };
            if r == img { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
        });
        &cnot * local * &cnot
    }

    #[test]
    fn mapped_words_implement_su2_copy() {
        let n = 3;
        let word = Su2Word::parse("T W Tinv Tinv W Winv T W").unwrap();
        // (plane, host, helper)
        for (plane, q, t) in [(1, 1, 2), (3, 2, 3), (5, 3, 2), (2, 1, 2), (4, 2, 3)] {
            let rot = PlanarRotation { plane, theta: 0.0 };
            let gates = map_word(&word, &rot, n).unwrap();
            let u = DenseUnitary::from_gates(n, &gen_gates(&gates), 6).unwrap();
            let want = embedded(n, &word.unitary, q, t);
            assert!((u.m - want).norm() < 1e-12, "plane {plane}");
        }
        let w = Su2Word::parse("W").unwrap();
        let g = map_word(&w, &PlanarRotation { plane: 1, theta: 0.0 }, 1);
        assert!(matches!(g, Err(Error::Range(_))));
        assert!(map_word(&Su2Word::new(vec![]), &PlanarRotation { plane: 1, theta: 0.0 }, 2).unwrap().is_empty());
        let gates = map_word(&w, &PlanarRotation { plane: 1, theta: 0.0 }, 2).unwrap();
        assert_eq!(gates.iter().map(|g| g.to_string()).collect::<Vec<_>>(), ["Stil(1)", "Stil(1)", "Rtil(1)"]);
        let t = map_word(&Su2Word::parse("T").unwrap(), &PlanarRotation { plane: 1, theta: 0.0 }, 1).unwrap();
        assert_eq!(t, vec![GeneratorId::new(GateKind::Ttil, 1)]);
    }

    #[test]
    fn rotation_targets_match_gates() {
        // the SU(2) target of a rotation embeds to the continuous gate itself
        for (plane, q, t, theta) in [(1, 1, 2, 0.37), (3, 2, 1, -1.3), (2, 1, 2, 2.2)] {
            let rot = PlanarRotation { plane, theta };
            let u = DenseUnitary::from_gates(2, &[rot.gate()], 6).unwrap();
            assert!((u.m - embedded(2, &rotation_target(&rot), q, t)).norm() < 1e-12);
        }
    }

    #[test]
    fn approx_ledger() {
        let cfg = SearchConfig::default();
        let id = approx_synthesize(&DMatrix::identity(4, 4), 0.1, &cfg).unwrap();
        assert_eq!(id.circuit.gate_count(), 0);
        assert_eq!(id.ledger.eps_loc, 0.0);
        let q = random_haar_so(3, 11);
        let res = approx_synthesize(&q, 0.1, &cfg).unwrap();
        assert!(res.ledger.eps_glob <= res.ledger.eps_loc + 1e-12);
        assert!(res.ledger.eps_loc <= 0.1 * (1.0 + 1e-6));
        let mut buf = Vec::new();
        write_ledger(&mut buf, &[res.ledger]).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("n,m,eps_budget,eps_loc,eps_glob,rel_gap\n"));
    }
}
