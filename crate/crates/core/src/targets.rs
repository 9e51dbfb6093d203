//! Benchmark targets: the XX-chain diagonalizer, seeded random ring targets
//! and Haar-random floating SO(2n) samples.

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::ring::RingScalar;
use crate::somat::{eval_product, GeneratorId, TransferMatrix};

/// Free-fermion XX ring and the orthogonal map that diagonalizes it.
#[derive(Clone, Debug)]
pub struct XxTarget {
    pub n: usize,
    pub q_dis: TransferMatrix,
    /// Majorana coupling matrix `t ⊗ [[0,1],[−1,0]]` of the periodic hopping ring.
    pub h_xx: TransferMatrix,
    /// Vacuum covariance `⊕ [[0,−1],[1,0]]` of |0…0⟩.
    pub gamma0: TransferMatrix,
    /// Single-particle energy of each mode, in the row order of `q_dis`.
    pub energies: Vec<f64>,
}

fn cos_sin_eighth(a: usize) -> (RingScalar, RingScalar) {
    let h = RingScalar::inv_sqrt2;
    let (z, o) = (RingScalar::zero, RingScalar::one);
    match a % 8 {
        0 => (o(), z()),
        1 => (h(), h()),
        2 => (z(), o()),
        3 => (-h(), h()),
        4 => (-o(), z()),
        5 => (-h(), -h()),
        6 => (z(), -o()),
        _ => (h(), -h()),
    }
}

/// `J ⊗`-interleave: entry `m` of a scalar n×n matrix becomes the block
/// `m·[[0,1],[−1,0]]` (if `antisym`) or `m·I₂`.
fn interleave(s: &[Vec<RingScalar>], antisym: bool) -> Result<TransferMatrix> {
    let n = s.len();
    let mut rows = vec![vec![RingScalar::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let v = &s[i][j];
            if antisym {
                rows[2 * i][2 * j + 1] = v.clone();
                rows[2 * i + 1][2 * j] = -v.clone();
            } else {
                rows[2 * i][2 * j] = v.clone();
                rows[2 * i + 1][2 * j + 1] = v.clone();
            }
        }
    }
    TransferMatrix::from_rows(rows)
}

/// Real standing-wave Fourier basis of the n-site ring: rows are the
/// constant mode, cos/sin pairs for `0 < k < n/2`, and the alternating mode.
fn standing_waves(n: usize) -> (Vec<Vec<RingScalar>>, Vec<f64>) {
    // √(2/n) and 1/√n for n ∈ {4, 8}
    let (amp, edge) = if n == 4 {
        (RingScalar::inv_sqrt2(), RingScalar::new(1, 0, 2))
    } else {
        (RingScalar::new(1, 0, 2), RingScalar::new(1, 0, 3))
    };
    let step = 8 / n;
    let mut rows = Vec::new();
    let mut energies = Vec::new();
    let energy = |k: usize| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos();
    rows.push(vec![edge.clone(); n]);
    energies.push(energy(0));
    for k in 1..n / 2 {
        let (c, s): (Vec<_>, Vec<_>) = (0..n).map(|j| cos_sin_eighth(step * k * j)).unzip();
        rows.push(c.iter().map(|x| x * &amp).collect());
        rows.push(s.iter().map(|x| x * &amp).collect());
        energies.push(energy(k));
        energies.push(energy(k));
    }
    rows.push((0..n).map(|j| if j % 2 == 0 { edge.clone() } else { -edge.clone() }).collect());
    energies.push(energy(n / 2));
    (rows, energies)
}

pub fn xx_target(n: usize) -> Result<XxTarget> {
    if n != 4 && n != 8 {
        return Err(Error::UnsupportedSize(n));
    }
    let (o, energies) = standing_waves(n);
    let q_dis = interleave(&o, false)?.verify()?;
    let mut t = vec![vec![RingScalar::zero(); n]; n];
    for j in 0..n {
        t[j][(j + 1) % n] = RingScalar::one();
        t[(j + 1) % n][j] = RingScalar::one();
    }
    let h_xx = interleave(&t, true)?;
    let gamma0 = crate::satenc::vacuum_covariance(n);
    Ok(XxTarget { n, q_dis, h_xx, gamma0, energies })
}

impl XxTarget {
    /// `Q_dis · h_xx · Q_disᵀ`.
    pub fn transformed_coupling(&self) -> Result<TransferMatrix> {
        self.q_dis.matmul(&self.h_xx)?.matmul(&self.q_dis.transpose())
    }

    /// Exact check that the transformed coupling is 2×2-block diagonal with
    /// antisymmetric blocks.
    pub fn block_diagonalizes(&self) -> Result<bool> {
        let m = self.transformed_coupling()?;
        let d = m.dim();
        for i in 0..d {
            for j in 0..d {
                let same_block = i / 2 == j / 2;
                let v = m.get(i, j);
                if !same_block && !v.is_zero() {
                    return Ok(false);
                }
                if same_block && !(v + m.get(j, i)).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn clifford_gates(n: usize) -> Vec<GeneratorId> {
    GeneratorId::all(n).into_iter().filter(|g| !g.is_t()).collect()
}

fn t_gates(n: usize) -> Vec<GeneratorId> {
    GeneratorId::all(n).into_iter().filter(|g| g.is_t()).collect()
}

/// Seeded random word with exactly `t_budget` T-kind gates and up to three
/// Clifford gates around each of them.
pub fn random_ring_word(n: usize, t_budget: usize, seed: u64) -> Vec<GeneratorId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cliffords = clifford_gates(n);
    let ts = t_gates(n);
    let mut word = Vec::new();
    for i in 0..=t_budget {
        for _ in 0..rng.random_range(0..=3) {
            word.push(*cliffords.choose(&mut rng).expect("n ≥ 1"));
        }
        if i < t_budget {
            word.push(*ts.choose(&mut rng).expect("n ≥ 1"));
        }
    }
    word
}

pub fn random_ring_target(n: usize, t_budget: usize, seed: u64) -> TransferMatrix {
    eval_product(n, &random_ring_word(n, t_budget, seed)).expect("generated sites are in range")
}

/// Seeded circuit with exactly `depth` non-empty layers of disjoint gates.
pub fn random_layered_circuit(n: usize, depth: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = GeneratorId::all(n);
    let mut layers = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut layer: Vec<GeneratorId> = Vec::new();
        let first = *all.choose(&mut rng).expect("n ≥ 1");
        layer.push(first);
        for _ in 0..n {
            if rng.random_bool(0.5) {
                let g = *all.choose(&mut rng).expect("n ≥ 1");
                if layer.iter().all(|h| !h.overlaps(g)) {
                    layer.push(g);
                }
            }
        }
        layers.push(layer);
    }
    Circuit { n, layers, provenance: format!("planted seed={seed}") }
}

/// Haar-random SO(2n) via QR of a Gaussian matrix with sign-fixed `R`.
pub fn random_haar_so(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_so_with(2 * n, &mut rng)
}

pub fn haar_so_with<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}
