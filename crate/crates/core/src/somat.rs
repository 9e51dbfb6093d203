//! Transfer matrices over D[√2] and the generator set 𝒢̃ ⊂ SO(2n).
//!
//! Convention: a gate sequence `g1, …, gd` in time order maps to the matrix
//! product `G_d ⋯ G_1` acting on Majorana coefficient column vectors. Under
//! this convention the transfer matrix of `R^z(θ) = exp(iθZ/2)` is the plane
//! rotation `[[cos θ, sin θ], [−sin θ, cos θ]]`, which is exactly the T̃
//! matrix at θ = π/4 (checked against the dense simulator in `spinrep`).

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{RingScalar, ZSqrt2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    Ttil,
    TtilInv,
    Stil,
    StilInv,
    Rtil,
    RtilInv,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::Ttil,
        GateKind::TtilInv,
        GateKind::Stil,
        GateKind::StilInv,
        GateKind::Rtil,
        GateKind::RtilInv,
    ];

    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::Ttil => GateKind::TtilInv,
            GateKind::TtilInv => GateKind::Ttil,
            GateKind::Stil => GateKind::StilInv,
            GateKind::StilInv => GateKind::Stil,
            GateKind::Rtil => GateKind::RtilInv,
            GateKind::RtilInv => GateKind::Rtil,
        }
    }

    pub fn is_t(self) -> bool {
        matches!(self, GateKind::Ttil | GateKind::TtilInv)
    }

    pub fn is_bond(self) -> bool {
        matches!(self, GateKind::Rtil | GateKind::RtilInv)
    }

    /// Rotation angle of the corresponding matchgate rotation
    /// (`R^z` for T/S kinds, `R^xx` for R kinds).
    pub fn angle(self) -> f64 {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        match self {
            GateKind::Ttil => FRAC_PI_4,
            GateKind::TtilInv => -FRAC_PI_4,
            GateKind::Stil | GateKind::Rtil => FRAC_PI_2,
            GateKind::StilInv | GateKind::RtilInv => -FRAC_PI_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Ttil => "Ttil",
            GateKind::TtilInv => "TtilInv",
            GateKind::Stil => "Stil",
            GateKind::StilInv => "StilInv",
            GateKind::Rtil => "Rtil",
            GateKind::RtilInv => "RtilInv",
        }
    }
}

/// A generator of 𝒢̃ placed on qubit `q` (T/S kinds) or bond `(q, q+1)`
/// (R kinds). Sites are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorId {
    pub kind: GateKind,
    pub q: usize,
}

impl GeneratorId {
    pub fn new(kind: GateKind, q: usize) -> Self {
        GeneratorId { kind, q }
    }

    pub fn inverse(self) -> Self {
        GeneratorId { kind: self.kind.inverse(), q: self.q }
    }

    pub fn is_t(self) -> bool {
        self.kind.is_t()
    }

    pub fn check(self, n: usize) -> Result<()> {
        let max = if self.kind.is_bond() { n.saturating_sub(1) } else { n };
        if self.q == 0 || self.q > max {
            return Err(Error::Range(format!("{self} on {n} qubits")));
        }
        Ok(())
    }

    /// 0-based Majorana indices `(p, p+1)` of the plane the gate rotates.
    pub fn plane(self) -> usize {
        if self.kind.is_bond() {
            2 * self.q - 1
        } else {
            2 * self.q - 2
        }
    }

    /// 1-based qubits touched by the gate.
    pub fn qubits(self) -> (usize, Option<usize>) {
        if self.kind.is_bond() {
            (self.q, Some(self.q + 1))
        } else {
            (self.q, None)
        }
    }

    pub fn touches(self, qubit: usize) -> bool {
        let (a, b) = self.qubits();
        a == qubit || b == Some(qubit)
    }

    pub fn overlaps(self, other: GeneratorId) -> bool {
        let (a, b) = other.qubits();
        self.touches(a) || b.is_some_and(|b| self.touches(b))
    }

    /// All generators for an `n`-qubit line, in a fixed order.
    pub fn all(n: usize) -> Vec<GeneratorId> {
        let mut out = Vec::new();
        for q in 1..=n {
            for kind in [GateKind::Ttil, GateKind::TtilInv, GateKind::Stil, GateKind::StilInv] {
                out.push(GeneratorId::new(kind, q));
            }
        }
        for q in 1..n {
            for kind in [GateKind::Rtil, GateKind::RtilInv] {
                out.push(GeneratorId::new(kind, q));
            }
        }
        out
    }

    /// The 2×2 block acting on [`plane`](Self::plane).
    pub fn block(self) -> [[RingScalar; 2]; 2] {
        let z = RingScalar::zero;
        let o = RingScalar::one;
        let s = RingScalar::inv_sqrt2;
        match self.kind {
            GateKind::Ttil => [[s(), s()], [-s(), s()]],
            GateKind::TtilInv => [[s(), -s()], [s(), s()]],
            GateKind::Stil | GateKind::Rtil => [[z(), o()], [-o(), z()]],
            GateKind::StilInv | GateKind::RtilInv => [[z(), -o()], [o(), z()]],
        }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind.name(), self.q)
    }
}

/// A 2n×2n matrix over D[√2], row-major.
///
/// Equality compares values only, not the verified flag.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    n: usize,
    entries: Vec<RingScalar>,
    k_max: u32,
    verified: bool,
}

impl PartialEq for TransferMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}

impl Eq for TransferMatrix {}

impl TransferMatrix {
    pub fn identity(n: usize) -> Self {
        let d = 2 * n;
        let mut entries = vec![RingScalar::zero(); d * d];
        for i in 0..d {
            entries[i * d + i] = RingScalar::one();
        }
        TransferMatrix { n, entries, k_max: 0, verified: true }
    }

    /// Build from row-major entries; not flagged as verified.
    pub fn from_entries(n: usize, entries: Vec<RingScalar>) -> Result<Self> {
        let d = 2 * n;
        if entries.len() != d * d {
            return Err(Error::Dimension(format!("{} entries for n = {n}", entries.len())));
        }
        let k_max = entries.iter().map(RingScalar::lde).max().unwrap_or(0);
        Ok(TransferMatrix { n, entries, k_max, verified: false })
    }

    pub fn from_rows(rows: Vec<Vec<RingScalar>>) -> Result<Self> {
        let d = rows.len();
        if !d.is_multiple_of(2) || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("matrix must be square of even size".into()));
        }
        Self::from_entries(d / 2, rows.into_iter().flatten().collect())
    }

    pub fn generator(n: usize, g: GeneratorId) -> Result<Self> {
        g.check(n)?;
        let mut m = TransferMatrix::identity(n);
        m.apply_left(g);
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &RingScalar {
        &self.entries[i * self.dim() + j]
    }

    pub fn entries(&self) -> &[RingScalar] {
        &self.entries
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn is_identity(&self) -> bool {
        *self == TransferMatrix::identity(self.n)
    }

    fn refresh_k_max(&mut self) {
        self.k_max = self.entries.iter().map(RingScalar::lde).max().unwrap_or(0);
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                entries.push(self.get(j, i).clone());
            }
        }
        TransferMatrix { n: self.n, entries, k_max: self.k_max, verified: self.verified }
    }

    pub fn matmul(&self, other: &TransferMatrix) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", self.n, other.n)));
        }
        let d = self.dim();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = RingScalar::zero();
                for t in 0..d {
                    let x = self.get(i, t);
                    let y = other.get(t, j);
                    if !x.is_zero() && !y.is_zero() {
                        acc = &acc + &(x * y);
                    }
                }
                entries.push(acc);
            }
        }
        let mut m = TransferMatrix { n: self.n, entries, k_max: 0, verified: self.verified && other.verified };
        m.refresh_k_max();
        Ok(m)
    }

    /// In-place `self ← G · self` for a generator `G` (a row operation).
    pub fn apply_left(&mut self, g: GeneratorId) {
        let d = self.dim();
        let p = g.plane();
        for j in 0..d {
            let x = self.entries[p * d + j].clone();
            let y = self.entries[(p + 1) * d + j].clone();
            let (nx, ny) = match g.kind {
                GateKind::Stil | GateKind::Rtil => (y, -x),
                GateKind::StilInv | GateKind::RtilInv => (-y, x),
                GateKind::Ttil => ((&x + &y).div_sqrt2_pow(1), (&y - &x).div_sqrt2_pow(1)),
                GateKind::TtilInv => ((&x - &y).div_sqrt2_pow(1), (&x + &y).div_sqrt2_pow(1)),
            };
            self.entries[p * d + j] = nx;
            self.entries[(p + 1) * d + j] = ny;
        }
        self.refresh_k_max();
    }

    /// Entries scaled to Z[√2] at a common exponent `e ≥ k_max`.
    pub fn scaled(&self, e: u32) -> Vec<ZSqrt2> {
        self.entries.iter().map(|x| x.scaled(e).expect("exponent below k_max")).collect()
    }

    /// Exact determinant by fraction-free elimination over Z[√2].
    pub fn determinant(&self) -> RingScalar {
        let d = self.dim();
        let e = self.k_max;
        let mut m = self.scaled(e);
        let mut prev = ZSqrt2::one();
        let mut negate = false;
        for k in 0..d {
            if m[k * d + k].is_zero() {
                let Some(r) = (k + 1..d).find(|&r| !m[r * d + k].is_zero()) else {
                    return RingScalar::zero();
                };
                for j in 0..d {
                    m.swap(k * d + j, r * d + j);
                }
                negate = !negate;
            }
            let piv = m[k * d + k].clone();
            for i in k + 1..d {
                let lead = m[i * d + k].clone();
                for j in k + 1..d {
                    let num = &(&m[i * d + j] * &piv) - &(&lead * &m[k * d + j]);
                    m[i * d + j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
                m[i * d + k] = ZSqrt2::zero();
            }
            prev = piv;
        }
        let det = if negate { -&m[d * d - 1] } else { m[d * d - 1].clone() };
        RingScalar::from_scaled(det, e * d as u32)
    }

    /// Exact check of `QᵀQ = I` and `det Q = +1`.
    pub fn is_special_orthogonal(&self) -> bool {
        let d = self.dim();
        let e = self.k_max;
        let m = self.scaled(e);
        let target = ZSqrt2::new(num_bigint::BigInt::from(1) << e as usize, 0);
        for i in 0..d {
            for j in i..d {
                let mut acc = ZSqrt2::zero();
                for t in 0..d {
                    acc = &acc + &(&m[t * d + i] * &m[t * d + j]);
                }
                let want = if i == j { target.clone() } else { ZSqrt2::zero() };
                if acc != want {
                    return false;
                }
            }
        }
        self.determinant().is_one()
    }

    /// Check membership in SO(2n) and flag the matrix as verified.
    pub fn verify(mut self) -> Result<Self> {
        if !self.verified && !self.is_special_orthogonal() {
            return Err(Error::NotOrthogonal("QᵀQ ≠ I or det ≠ +1".into()));
        }
        self.verified = true;
        Ok(self)
    }

    pub fn to_float(&self) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = self.get(i, j).to_f64()?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        for i in 0..d {
            let row: Vec<String> = (0..d).map(|j| self.get(i, j).to_text()).collect();
            writeln!(f, "[{}]", row.join("  "))?;
        }
        Ok(())
    }
}

/// Product `G_d ⋯ G_1` of a time-ordered gate list.
pub fn eval_product(n: usize, gates: &[GeneratorId]) -> Result<TransferMatrix> {
    let mut m = TransferMatrix::identity(n);
    for &g in gates {
        g.check(n)?;
        m.apply_left(g);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(kind: GateKind, q: usize) -> GeneratorId {
        GeneratorId::new(kind, q)
    }

    fn rs(a: i64, b: i64, k: u32) -> RingScalar {
        RingScalar::new(a, b, k)
    }

    #[test]
    fn generator_matrices() {
        let t = TransferMatrix::generator(1, g(GateKind::Ttil, 1)).unwrap();
        let s = rs(1, 0, 1);
        assert_eq!(t.entries(), &[s.clone(), s.clone(), -&s, s.clone()]);
        let st = TransferMatrix::generator(1, g(GateKind::Stil, 1)).unwrap();
        assert_eq!(st.entries(), &[rs(0, 0, 0), rs(1, 0, 0), rs(-1, 0, 0), rs(0, 0, 0)]);
        let r = TransferMatrix::generator(2, g(GateKind::Rtil, 1)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = match (i, j) {
                    (1, 2) => 1,
                    (2, 1) => -1,
                    (1, 1) | (2, 2) => 0,
                    _ if i == j => 1,
                    _ => 0,
                };
                assert_eq!(r.get(i, j), &RingScalar::from_int(want), "({i},{j})");
            }
        }
        assert!(TransferMatrix::generator(2, g(GateKind::Rtil, 2)).is_err());
        assert!(TransferMatrix::generator(2, g(GateKind::Ttil, 0)).is_err());
    }

    #[test]
    fn inverse_kinds_are_transposes() {
        for gen in GeneratorId::all(3) {
            let m = TransferMatrix::generator(3, gen).unwrap();
            let mi = TransferMatrix::generator(3, gen.inverse()).unwrap();
            assert_eq!(m.transpose(), mi);
            assert!(m.matmul(&mi).unwrap().is_identity());
            assert!(m.is_special_orthogonal());
        }
    }

    #[test]
    fn small_products() {
        let s = TransferMatrix::generator(1, g(GateKind::Stil, 1)).unwrap();
        assert!(s.matmul(&s.transpose()).unwrap().is_identity());
        let s2 = s.matmul(&s).unwrap();
        assert_eq!(s2.entries(), &[rs(-1, 0, 0), rs(0, 0, 0), rs(0, 0, 0), rs(-1, 0, 0)]);
        // two π/4 rotations compose to the π/2 rotation, which is S̃ itself
        let t = TransferMatrix::generator(1, g(GateKind::Ttil, 1)).unwrap();
        assert_eq!(t.matmul(&t).unwrap(), s);
    }

    #[test]
    fn special_orthogonality() {
        let mut entries = TransferMatrix::identity(2).entries().to_vec();
        entries[0] = RingScalar::from_int(-1);
        let flipped = TransferMatrix::from_entries(2, entries).unwrap();
        assert!(!flipped.is_special_orthogonal());
        assert_eq!(flipped.determinant(), RingScalar::from_int(-1));

        let q = eval_product(2, &[g(GateKind::Ttil, 1), g(GateKind::Rtil, 1), g(GateKind::Ttil, 2)]).unwrap();
        assert!(q.is_special_orthogonal());
        let mut e = q.entries().to_vec();
        e[5] = &e[5] + &rs(1, 0, 3);
        assert!(!TransferMatrix::from_entries(2, e).unwrap().is_special_orthogonal());
    }

    #[test]
    fn k_max_examples() {
        assert_eq!(TransferMatrix::identity(3).k_max(), 0);
        assert_eq!(TransferMatrix::generator(1, g(GateKind::Ttil, 1)).unwrap().k_max(), 1);
        let layer = eval_product(3, &[g(GateKind::Ttil, 1), g(GateKind::Ttil, 2), g(GateKind::Ttil, 3)]).unwrap();
        assert_eq!(layer.k_max(), 1);
    }

    #[test]
    fn eval_product_examples() {
        assert!(eval_product(2, &[]).unwrap().is_identity());
        assert_eq!(
            eval_product(1, &[g(GateKind::Stil, 1)]).unwrap(),
            TransferMatrix::generator(1, g(GateKind::Stil, 1)).unwrap()
        );
        assert!(eval_product(1, &[g(GateKind::Ttil, 1); 8]).unwrap().is_identity());
        assert!(eval_product(1, &[g(GateKind::Rtil, 1)]).is_err());
    }

    #[test]
    fn time_order_is_right_to_left() {
        let a = g(GateKind::Ttil, 1);
        let b = g(GateKind::Rtil, 1);
        let ma = TransferMatrix::generator(2, a).unwrap();
        let mb = TransferMatrix::generator(2, b).unwrap();
        assert_eq!(eval_product(2, &[a, b]).unwrap(), mb.matmul(&ma).unwrap());
    }
}
