//! Exact synthesis of ring-valued SO(2n) matrices by column reduction.
//!
//! Each column is brought to a unit vector by repeatedly pairing entries whose
//! scaled numerators have odd rational part, routing each pair onto a T̃ plane
//! with signed transpositions and applying T̃, which lowers the column's
//! denominator exponent. The recorded row operations are inverted at the end.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::ring::Residue;
use crate::somat::{GateKind, GeneratorId, TransferMatrix};

#[derive(Clone, Debug)]
pub struct SynthesisReport {
    pub circuit: Circuit,
    pub k_max_in: u32,
    pub nt_bound: u128,
    pub nc_bound: u128,
    pub t_depth_lb: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateCountBounds {
    pub nt_bound: u128,
    pub nc_bound: u128,
}

/// Worst-case T and Clifford counts for an `n`-qubit target of maximal
/// denominator exponent `k`.
pub fn gate_count_bounds(n: usize, k: u32) -> GateCountBounds {
    let (n, k) = (n as u128, k as u128);
    let nt = k * (4 * n * n * n + 9 * n * n - 7 * n) / 6;
    let perm = n * (2 * n + 3);
    let nc = 2 * k * n * (n - 1) * (n + 2) * (2 * n - 1) / 3 + perm;
    GateCountBounds { nt_bound: nt, nc_bound: nc }
}

/// Every T̄ layer raises the denominator exponent by at most one.
pub fn t_depth_lower_bound(q: &TransferMatrix) -> u32 {
    q.k_max()
}

/// Signed transposition on rows `(i, i+1)` (0-based).
fn swap_gate(i: usize, inverse: bool) -> GeneratorId {
    let kind = match (i.is_multiple_of(2), inverse) {
        (true, false) => GateKind::Stil,
        (true, true) => GateKind::StilInv,
        (false, false) => GateKind::Rtil,
        (false, true) => GateKind::RtilInv,
    };
    GeneratorId::new(kind, if i.is_multiple_of(2) { i / 2 + 1 } else { i.div_ceil(2) })
}

struct Reducer {
    w: TransferMatrix,
    ops: Vec<GeneratorId>,
}

impl Reducer {
    fn apply(&mut self, g: GeneratorId) {
        self.w.apply_left(g);
        self.ops.push(g);
    }

    fn col_lde(&self, j: usize) -> u32 {
        (j..self.w.dim()).map(|i| self.w.get(i, j).lde()).max().unwrap_or(0)
    }

    /// Move the entry at row `from` up to row `to` by adjacent swaps.
    fn bubble_up(&mut self, from: usize, to: usize) {
        for i in (to..from).rev() {
            self.apply(swap_gate(i, false));
        }
    }

    fn reduce_column(&mut self, j: usize) -> Result<()> {
        let d = self.w.dim();
        let mut k = self.col_lde(j);
        while k > 0 {
            loop {
                let res: Vec<Residue> = (j..d).map(|i| self.w.get(i, j).scaled(k).expect("k is the column lde").residue()).collect();
                let Some(p1) = res.iter().position(|r| !r.is_reducible()) else { break };
                let Some(p2) = (p1 + 1..res.len()).find(|&p| res[p] == res[p1]) else {
                    return Err(Error::Internal(format!("column {} has an unpaired residue {}", j + 1, res[p1])));
                };
                let (mut r1, r2) = (j + p1, j + p2);
                self.bubble_up(r2, r1 + 1);
                if r1 % 2 == 1 {
                    if r1 > j {
                        // pair to (r1−1, r1)
                        self.apply(swap_gate(r1 - 1, false));
                        self.apply(swap_gate(r1, false));
                        r1 -= 1;
                    } else {
                        // pair to (r1+1, r1+2)
                        self.apply(swap_gate(r1 + 1, false));
                        self.apply(swap_gate(r1, false));
                        r1 += 1;
                    }
                }
                self.apply(GeneratorId::new(GateKind::Ttil, r1 / 2 + 1));
            }
            let next = self.col_lde(j);
            if next >= k {
                return Err(Error::Internal(format!("column {} lde did not decrease from {k}", j + 1)));
            }
            k = next;
        }
        // single ±1 left in rows j..
        let Some(r) = (j..d).find(|&i| !self.w.get(i, j).is_zero()) else {
            return Err(Error::Internal(format!("column {} vanished", j + 1)));
        };
        let negative = self.w.get(r, j).a().sign() == num_bigint::Sign::Minus;
        if r > j {
            self.bubble_up(r, j + 1);
            // moving row j+1 to j keeps the sign for the forward swap
            self.apply(swap_gate(j, negative));
        } else if negative {
            self.apply(swap_gate(j, false));
            self.apply(swap_gate(j, false));
        }
        if !self.w.get(j, j).is_one() {
            return Err(Error::Internal(format!("column {} did not reach a unit vector", j + 1)));
        }
        Ok(())
    }
}

/// Exact circuit for a special-orthogonal ring matrix.
pub fn synthesize(q: &TransferMatrix) -> Result<SynthesisReport> {
    if !q.is_special_orthogonal() {
        return Err(Error::NotOrthogonal("target is not in SO(2n)".into()));
    }
    let n = q.n();
    let d = q.dim();
    let mut red = Reducer { w: q.clone(), ops: Vec::new() };
    for j in 0..d.saturating_sub(1) {
        red.reduce_column(j)?;
    }
    if !red.w.is_identity() {
        return Err(Error::Internal("reduction did not reach the identity".into()));
    }
    let gates: Vec<GeneratorId> = red.ops.iter().rev().map(|g| g.inverse()).collect();
    let circuit = Circuit::from_gates(n, &gates).with_provenance("exact");
    let b = gate_count_bounds(n, q.k_max());
    Ok(SynthesisReport { circuit, k_max_in: q.k_max(), nt_bound: b.nt_bound, nc_bound: b.nc_bound, t_depth_lb: t_depth_lower_bound(q) })
}
