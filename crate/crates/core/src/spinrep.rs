//! Dense state-vector simulation of matchgates for n ≤ 6 qubits.
//!
//! Qubit 1 is the leftmost tensor factor (most significant bit of a basis
//! index). Majoranas follow Jordan–Wigner: `c_{2j−1} = Z…Z X_j`,
//! `c_{2j} = Z…Z Y_j`. Rotations are `R^z(θ) = exp(iθZ/2)` and
//! `R^xx(θ) = exp(iθ X⊗X/2)`; both equal `exp((θ/2) c_a c_b)` on their plane.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64 as C64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::somat::{GateKind, GeneratorId};

pub const DEFAULT_QUBIT_CAP: usize = 6;

pub type CMatrix = DMatrix<C64>;

/// Gates the simulator understands: discrete generators and the continuous
/// rotations they are drawn from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Gen(GeneratorId),
    /// `R^z(θ)` on qubit `q`.
    Rz { q: usize, theta: f64 },
    /// `R^xx(θ)` on qubits `(q, q+1)`.
    Rxx { q: usize, theta: f64 },
}

impl Gate {
    fn rotation(self) -> (bool, usize, f64) {
        match self {
            Gate::Gen(g) => (g.kind.is_bond(), g.q, g.kind.angle()),
            Gate::Rz { q, theta } => (false, q, theta),
            Gate::Rxx { q, theta } => (true, q, theta),
        }
    }
}

impl From<GeneratorId> for Gate {
    fn from(g: GeneratorId) -> Self {
        Gate::Gen(g)
    }
}

/// Pauli string `i^phase · X^x Z^z` with bit masks over basis indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pauli {
    pub x: usize,
    pub z: usize,
    pub phase: u8,
}

fn ipow(p: u8) -> C64 {
    match p % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn bit(n: usize, q: usize) -> usize {
    1 << (n - q)
}

impl Pauli {
    /// `P|s⟩ = coeff(s) |s ⊕ x⟩`.
    pub fn coeff(&self, s: usize) -> C64 {
        let sign = if (self.z & s).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        ipow(self.phase) * sign
    }

    pub fn dense(&self, n: usize) -> CMatrix {
        let dim = 1 << n;
        let mut m = CMatrix::zeros(dim, dim);
        for s in 0..dim {
            m[(s ^ self.x, s)] = self.coeff(s);
        }
        m
    }
}

/// Majorana `c_l` (1-based) on `n` qubits.
pub fn majorana(n: usize, l: usize) -> Pauli {
    let j = l.div_ceil(2);
    let mut z = 0;
    for q in 1..j {
        z |= bit(n, q);
    }
    let b = bit(n, j);
    if l % 2 == 1 {
        Pauli { x: b, z, phase: 0 }
    } else {
        // Y = iXZ
        Pauli { x: b, z: z | b, phase: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    pub n: usize,
    pub m: CMatrix,
}

impl DenseUnitary {
    pub fn identity(n: usize) -> Self {
        DenseUnitary { n, m: CMatrix::identity(1 << n, 1 << n) }
    }

    pub fn from_matrix(n: usize, m: CMatrix) -> Result<Self> {
        if m.nrows() != 1 << n || m.ncols() != 1 << n {
            return Err(Error::Dimension(format!("{}×{} matrix for {n} qubits", m.nrows(), m.ncols())));
        }
        Ok(DenseUnitary { n, m })
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn adjoint(&self) -> Self {
        DenseUnitary { n: self.n, m: self.m.adjoint() }
    }

    pub fn mul(&self, other: &DenseUnitary) -> Self {
        DenseUnitary { n: self.n, m: &self.m * &other.m }
    }

    /// In-place `U ← G·U` for a rotation gate.
    pub fn apply_left(&mut self, gate: Gate) {
        let (bond, q, theta) = gate.rotation();
        let dim = self.dim();
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        if !bond {
            let b = bit(self.n, q);
            let plus = C64::new(c, s);
            let minus = plus.conj();
            for r in 0..dim {
                let f = if r & b == 0 { plus } else { minus };
                for col in 0..dim {
                    self.m[(r, col)] *= f;
                }
            }
        } else {
            let mask = bit(self.n, q) | bit(self.n, q + 1);
            let is = C64::new(0.0, s);
            for r in 0..dim {
                let r2 = r ^ mask;
                if r2 < r {
                    continue;
                }
                for col in 0..dim {
                    let x = self.m[(r, col)];
                    let y = self.m[(r2, col)];
                    self.m[(r, col)] = x * c + y * is;
                    self.m[(r2, col)] = y * c + x * is;
                }
            }
        }
    }

    /// Unitary of a time-ordered gate list, `U_d ⋯ U_1`.
    pub fn from_gates(n: usize, gates: &[Gate], cap: usize) -> Result<Self> {
        if n > cap {
            return Err(Error::Cap { n, cap });
        }
        let mut u = DenseUnitary::identity(n);
        for &g in gates {
            check_site(n, g)?;
            u.apply_left(g);
        }
        Ok(u)
    }

    pub fn from_circuit(c: &Circuit) -> Result<Self> {
        let gates: Vec<Gate> = c.gates().into_iter().map(Gate::Gen).collect();
        Self::from_gates(c.n, &gates, DEFAULT_QUBIT_CAP)
    }

    /// Deviation of `U†U` from the identity in operator norm.
    pub fn unitarity_error(&self) -> f64 {
        spectral_norm(&(self.m.adjoint() * &self.m - CMatrix::identity(self.dim(), self.dim())))
    }
}

fn check_site(n: usize, g: Gate) -> Result<()> {
    let (bond, q, _) = g.rotation();
    let max = if bond { n.saturating_sub(1) } else { n };
    if q == 0 || q > max {
        return Err(Error::Range(format!("{g:?} on {n} qubits")));
    }
    Ok(())
}

/// Dense unitary of a single gate.
pub fn gate_unitary(n: usize, gate: Gate) -> Result<DenseUnitary> {
    DenseUnitary::from_gates(n, &[gate], DEFAULT_QUBIT_CAP)
}

/// Generator list to simulator gates.
pub fn gen_gates(gates: &[GeneratorId]) -> Vec<Gate> {
    gates.iter().copied().map(Gate::Gen).collect()
}

/// `Tr[P A]` for a Pauli string `P`.
fn pauli_trace(p: &Pauli, a: &CMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for t in 0..a.nrows() {
        acc += p.coeff(t) * a[(t, t ^ p.x)];
    }
    acc
}

/// Transfer matrix `Q_{μν} = 2^{−n} Tr[c_μ U c_ν U†]`, so that
/// `U c_ν U† = Σ_μ Q_{μν} c_μ`.
pub fn transfer_matrix(u: &DenseUnitary) -> Result<DMatrix<f64>> {
    let n = u.n;
    let d = 2 * n;
    let scale = 1.0 / (1usize << n) as f64;
    let cs: Vec<Pauli> = (1..=d).map(|l| majorana(n, l)).collect();
    let ud = u.m.adjoint();
    let mut q = DMatrix::zeros(d, d);
    let mut worst_imag: f64 = 0.0;
    for (nu, c_nu) in cs.iter().enumerate() {
        let conj = &u.m * c_nu.dense(n) * &ud;
        for (mu, c_mu) in cs.iter().enumerate() {
            let v = pauli_trace(c_mu, &conj) * scale;
            worst_imag = worst_imag.max(v.im.abs());
            q[(mu, nu)] = v.re;
        }
    }
    let orth = orthogonality_error(&q);
    if worst_imag > 1e-9 || orth > 1e-9 {
        return Err(Error::NotMatchgate(format!("imaginary part {worst_imag:e}, QᵀQ − I = {orth:e}")));
    }
    Ok(q)
}

/// Max-abs entry of `QᵀQ − I`.
pub fn orthogonality_error(q: &DMatrix<f64>) -> f64 {
    let d = q.nrows();
    (q.transpose() * q - DMatrix::<f64>::identity(d, d)).abs().max()
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.singular_values().max()
}

pub fn real_spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().max()
}

/// Operator-norm distance `‖U − V‖`.
pub fn op_norm_dist(u: &DenseUnitary, v: &DenseUnitary) -> Result<f64> {
    same_dims(u, v)?;
    Ok(spectral_norm(&(&u.m - &v.m)))
}

fn same_dims(u: &DenseUnitary, v: &DenseUnitary) -> Result<()> {
    if u.n != v.n {
        return Err(Error::Dimension(format!("{} vs {} qubits", u.n, v.n)));
    }
    Ok(())
}

/// Eigenvalues of a unitary matrix (diagonal of its complex Schur form).
pub fn unitary_eigenvalues(w: &CMatrix) -> Vec<C64> {
    let (_, t) = Schur::new(w.clone()).unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// `‖W⊗W* − I‖ = max_{j,k} |e^{i(θ_j − θ_k)} − 1|` over eigenphases of `W`.
pub fn adjoint_norm_from_eigenvalues(ev: &[C64]) -> f64 {
    let unit: Vec<C64> = ev.iter().map(|z| z / z.norm()).collect();
    let mut best: f64 = 0.0;
    for a in &unit {
        for b in &unit {
            best = best.max((a * b.conj() - 1.0).norm());
        }
    }
    best
}

/// Phase-insensitive distance `‖U⊗U* − V⊗V*‖`, evaluated from the
/// eigenphases of `U†V`.
pub fn adjoint_dist(u: &DenseUnitary, v: &DenseUnitary) -> Result<f64> {
    same_dims(u, v)?;
    let w = u.m.adjoint() * &v.m;
    Ok(adjoint_norm_from_eigenvalues(&unitary_eigenvalues(&w)))
}

/// Linear operator entanglement `1 − Σ s_i⁴` of a two-qubit unitary, with
/// `s_i` the operator-Schmidt coefficients normalized to `Σ s_i² = 1`.
pub fn operator_entanglement(u: &DenseUnitary) -> Result<f64> {
    if u.n != 2 {
        return Err(Error::Dimension(format!("operator entanglement needs 2 qubits, got {}", u.n)));
    }
    // M[(i1 j1), (i2 j2)] = U[(i1 i2), (j1 j2)]
    let mut m = CMatrix::zeros(4, 4);
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    m[(2 * i1 + j1, 2 * i2 + j2)] = u.m[(2 * i1 + i2, 2 * j1 + j2)];
                }
            }
        }
    }
    let sv = m.singular_values();
    let total: f64 = sv.iter().map(|s| s * s).sum();
    Ok(1.0 - sv.iter().map(|s| (s * s / total).powi(2)).sum::<f64>())
}

/// `2^{−n} Σ_P ⟨P⟩⁴` over all Pauli strings.
pub fn stabilizer_entropy(state: &[C64]) -> Result<f64> {
    let dim = state.len();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("state of length {dim}")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > DEFAULT_QUBIT_CAP {
        return Err(Error::Cap { n, cap: DEFAULT_QUBIT_CAP });
    }
    let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization((norm - 1.0).abs()));
    }
    let mut total = 0.0;
    for x in 0..dim {
        for z in 0..dim {
            let p = Pauli { x, z, phase: 0 };
            let mut e = C64::new(0.0, 0.0);
            for s in 0..dim {
                e += state[s ^ x].conj() * p.coeff(s) * state[s];
            }
            total += e.norm_sqr().powi(2);
        }
    }
    Ok(total / dim as f64)
}

/// First column of `U`, i.e. `U|0…0⟩`.
pub fn apply_to_zero(u: &DenseUnitary) -> Vec<C64> {
    u.m.column(0).iter().copied().collect()
}

/// Covariance `Γ_{αβ} = ⟨(i/2)[c_α, c_β]⟩` of a pure state.
pub fn covariance(n: usize, state: &[C64]) -> DMatrix<f64> {
    let d = 2 * n;
    let cs: Vec<Pauli> = (1..=d).map(|l| majorana(n, l)).collect();
    let mut g = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            if a == b {
                continue;
            }
            // (i/2)[c_a, c_b] = i c_a c_b for a ≠ b
            let mut e = C64::new(0.0, 0.0);
            for s in 0..state.len() {
                let t = s ^ cs[b].x;
                let v = cs[a].coeff(t) * cs[b].coeff(s) * state[s];
                e += state[t ^ cs[a].x].conj() * v;
            }
            g[(a, b)] = (C64::new(0.0, 1.0) * e).re;
        }
    }
    g
}

/// Plane-rotation block decomposition `R = O B Oᵀ` of a real special
/// orthogonal matrix: returns the basis `O` and `(a, b, λ)` triples meaning a
/// rotation by `λ` in the plane spanned by columns `a`, `b` of `O`, with the
/// block `[[cos λ, sin λ], [−sin λ, cos λ]]`.
pub fn rotation_blocks(r: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<(usize, usize, f64)>)> {
    let d = r.nrows();
    let (o, t) = Schur::new(r.clone()).unpack();
    let mut blocks = Vec::new();
    let mut minus_ones = Vec::new();
    let mut i = 0;
    while i < d {
        if i + 1 < d && (t[(i + 1, i)].abs() > 1e-13 || t[(i, i + 1)].abs() > 1e-13) {
            let s = (t[(i, i + 1)] - t[(i + 1, i)]) / 2.0;
            let c = (t[(i, i)] + t[(i + 1, i + 1)]) / 2.0;
            blocks.push((i, i + 1, s.atan2(c)));
            i += 2;
        } else {
            if t[(i, i)] < 0.0 {
                minus_ones.push(i);
            }
            i += 1;
        }
    }
    if minus_ones.len() % 2 == 1 {
        return Err(Error::Reflection);
    }
    for pair in minus_ones.chunks(2) {
        blocks.push((pair[0], pair[1], PI));
    }
    Ok((o, blocks))
}

/// Matchgate unitary whose transfer matrix is `R`, built from the
/// plane-rotation blocks of `R` in the rotated Majorana basis
/// `c'_a = Σ_ν O_{νa} c_ν`. Determined up to a global sign.
pub fn lift(r: &DMatrix<f64>) -> Result<DenseUnitary> {
    let d = r.nrows();
    let n = d / 2;
    if !d.is_multiple_of(2) || n == 0 {
        return Err(Error::Dimension(format!("{d}×{d} is not an SO(2n) size")));
    }
    if n > DEFAULT_QUBIT_CAP {
        return Err(Error::Cap { n, cap: DEFAULT_QUBIT_CAP });
    }
    let (o, blocks) = rotation_blocks(r)?;
    let cs: Vec<CMatrix> = (1..=d).map(|l| majorana(n, l).dense(n)).collect();
    let rotated = |a: usize| -> CMatrix {
        let mut m = CMatrix::zeros(1 << n, 1 << n);
        for (nu, c) in cs.iter().enumerate() {
            let w = o[(nu, a)];
            if w != 0.0 {
                m += c * C64::new(w, 0.0);
            }
        }
        m
    };
    let dim = 1 << n;
    let mut v = CMatrix::identity(dim, dim);
    for (a, b, lam) in blocks {
        if lam.abs() < 1e-15 {
            continue;
        }
        let gen = rotated(a) * rotated(b);
        let f = CMatrix::identity(dim, dim) * C64::new((lam / 2.0).cos(), 0.0) + gen * C64::new((lam / 2.0).sin(), 0.0);
        v = f * v;
    }
    Ok(DenseUnitary { n, m: v })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftBoundRecord {
    pub n: usize,
    pub eps_so: f64,
    pub eps_spin: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compare the SO(2n) distance of two orthogonal matrices with the adjoint
/// distance of their matchgate lifts against the linear bound `(π/2)·n·ε_SO`.
pub fn check_lift_bound(q: &DMatrix<f64>, qe: &DMatrix<f64>) -> Result<LiftBoundRecord> {
    if q.shape() != qe.shape() || q.nrows() != q.ncols() {
        return Err(Error::Dimension("matrices must be square and equal size".into()));
    }
    for m in [q, qe] {
        let err = orthogonality_error(m);
        if err > 1e-9 {
            return Err(Error::NotOrthogonal(format!("QᵀQ − I = {err:e}")));
        }
    }
    let n = q.nrows() / 2;
    let eps_so = real_spectral_norm(&(q - qe));
    let r = q.transpose() * qe;
    let v = lift(&r)?;
    let eps_spin = adjoint_norm_from_eigenvalues(&unitary_eigenvalues(&v.m));
    let bound = PI / 2.0 * n as f64 * eps_so;
    Ok(LiftBoundRecord { n, eps_so, eps_spin, bound, holds: eps_spin <= bound + 1e-9 })
}

/// Dense state `U|0…0⟩` as a vector.
pub fn state_vector(u: &DenseUnitary) -> DVector<C64> {
    u.m.column(0).into_owned()
}

/// Map a generator kind onto its rotation for display purposes.
pub fn generator_rotation(g: GeneratorId) -> Gate {
    match g.kind {
        GateKind::Rtil | GateKind::RtilInv => Gate::Rxx { q: g.q, theta: g.kind.angle() },
        _ => Gate::Rz { q: g.q, theta: g.kind.angle() },
    }
}
