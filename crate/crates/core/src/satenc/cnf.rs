//! CNF containers, Tseitin gadgets with constant folding, and DIMACS/WCNF
//! emission.

use std::fmt::Write as _;
use std::ops::Not;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::somat::GeneratorId;

/// A Boolean that is either known at encode time or a DIMACS literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bit {
    Const(bool),
    Lit(i32),
}

impl Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        match self {
            Bit::Const(b) => Bit::Const(!b),
            Bit::Lit(l) => Bit::Lit(-l),
        }
    }
}

pub const FALSE: Bit = Bit::Const(false);
pub const TRUE: Bit = Bit::Const(true);

/// Two's-complement integer, least significant bit first.
pub type Word = Vec<Bit>;

/// Element `A + B√2` of Z[√2] with both components as words of equal width.
#[derive(Clone, Debug)]
pub struct ZWord {
    pub a: Word,
    pub b: Word,
}

/// Where the gate selectors live in the variable numbering.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarMap {
    pub n: usize,
    pub depth: usize,
    /// Generator order within every layer.
    pub gens: Vec<GeneratorId>,
    /// `selectors[i][j]` is the variable for generator `gens[j]` in layer `i`.
    pub selectors: Vec<Vec<i32>>,
    /// Variables `aux_start..=num_vars` are auxiliaries (matrix bits, carries).
    pub aux_start: usize,
}

impl VarMap {
    pub fn t_selectors(&self) -> Vec<i32> {
        self.selectors
            .iter()
            .flat_map(|layer| layer.iter().zip(&self.gens).filter(|(_, g)| g.is_t()).map(|(&v, _)| v))
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfInstance {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    pub varmap: VarMap,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WcnfInstance {
    pub hard: CnfInstance,
    pub soft: Vec<(u64, Vec<i32>)>,
}

impl WcnfInstance {
    pub fn top(&self) -> u64 {
        self.soft.iter().map(|(w, _)| w).sum::<u64>() + 1
    }
}

pub fn emit_dimacs(inst: &CnfInstance) -> String {
    let mut s = format!("p cnf {} {}\n", inst.num_vars, inst.clauses.len());
    for c in &inst.clauses {
        for l in c {
            write!(s, "{l} ").expect("write to string");
        }
        s.push_str("0\n");
    }
    s
}

pub fn emit_wcnf(inst: &WcnfInstance) -> String {
    let top = inst.top();
    let h = &inst.hard;
    let mut s = format!("p wcnf {} {} {}\n", h.num_vars, h.clauses.len() + inst.soft.len(), top);
    for c in &h.clauses {
        write!(s, "{top} ").expect("write to string");
        for l in c {
            write!(s, "{l} ").expect("write to string");
        }
        s.push_str("0\n");
    }
    for (w, c) in &inst.soft {
        write!(s, "{w} ").expect("write to string");
        for l in c {
            write!(s, "{l} ").expect("write to string");
        }
        s.push_str("0\n");
    }
    s
}

fn parse_clauses(text: &str, kind: &str) -> Result<(Vec<usize>, Vec<Vec<i64>>)> {
    let mut header = None;
    let mut clauses = Vec::new();
    let mut cur: Vec<i64> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            let mut it = rest.split_whitespace();
            if it.next() != Some(kind) {
                return Err(Error::Parse(format!("expected a 'p {kind}' header")));
            }
            let nums: Vec<usize> =
                it.map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header '{line}'")))).collect::<Result<_>>()?;
            header = Some(nums);
            continue;
        }
        if header.is_none() {
            return Err(Error::Parse("clause before header".into()));
        }
        for t in line.split_whitespace() {
            let v: i64 = t.parse().map_err(|_| Error::Parse(format!("bad token '{t}'")))?;
            if v == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else {
                cur.push(v);
            }
        }
    }
    if !cur.is_empty() {
        clauses.push(cur);
    }
    Ok((header.ok_or_else(|| Error::Parse("missing header".into()))?, clauses))
}

fn to_lits(c: &[i64], num_vars: usize) -> Result<Vec<i32>> {
    c.iter()
        .map(|&l| {
            if l.unsigned_abs() as usize > num_vars {
                Err(Error::Parse(format!("literal {l} exceeds {num_vars} variables")))
            } else {
                Ok(l as i32)
            }
        })
        .collect()
}

/// Parse a DIMACS CNF file.
pub fn parse_dimacs(text: &str) -> Result<CnfInstance> {
    let (h, raw) = parse_clauses(text, "cnf")?;
    let &[num_vars, _] = h.as_slice() else { return Err(Error::Parse("header needs 2 numbers".into())) };
    let clauses = raw.iter().map(|c| to_lits(c, num_vars)).collect::<Result<_>>()?;
    Ok(CnfInstance { num_vars, clauses, varmap: VarMap::default() })
}

/// Parse a classic top-weight WCNF file; clauses weighing `top` are hard.
pub fn parse_wcnf(text: &str) -> Result<WcnfInstance> {
    let (h, raw) = parse_clauses(text, "wcnf")?;
    let &[num_vars, _, top] = h.as_slice() else { return Err(Error::Parse("header needs 3 numbers".into())) };
    let mut hard = CnfInstance { num_vars, ..CnfInstance::default() };
    let mut soft = Vec::new();
    for c in raw {
        let (&w, lits) = c.split_first().ok_or_else(|| Error::Parse("clause without weight".into()))?;
        let lits = to_lits(lits, num_vars)?;
        if w as usize >= top {
            hard.clauses.push(lits);
        } else if w > 0 {
            soft.push((w as u64, lits));
        } else {
            return Err(Error::Parse(format!("bad weight {w}")));
        }
    }
    Ok(WcnfInstance { hard, soft })
}

/// Clause sink with Tseitin gadgets.
#[derive(Debug, Default)]
pub struct Builder {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    /// Set once an empty clause was derived at encode time.
    pub contradiction: bool,
}

impl Builder {
    pub fn fresh(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    pub fn clause(&mut self, lits: &[Bit]) {
        let mut out: Vec<i32> = Vec::with_capacity(lits.len());
        for &b in lits {
            match b {
                Bit::Const(true) => return,
                Bit::Const(false) => {}
                Bit::Lit(l) => {
                    if out.contains(&-l) {
                        return;
                    }
                    if !out.contains(&l) {
                        out.push(l);
                    }
                }
            }
        }
        if out.is_empty() {
            self.contradiction = true;
        } else {
            self.clauses.push(out);
        }
    }

    pub fn and(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(false), _) | (_, Bit::Const(false)) => FALSE,
            (Bit::Const(true), x) | (x, Bit::Const(true)) => x,
            _ if a == b => a,
            _ if a == !b => FALSE,
            _ => {
                let z = Bit::Lit(self.fresh());
                self.clause(&[!z, a]);
                self.clause(&[!z, b]);
                self.clause(&[z, !a, !b]);
                z
            }
        }
    }

    pub fn or(&mut self, a: Bit, b: Bit) -> Bit {
        let z = self.and(!a, !b);
        !z
    }

    pub fn xor(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(x), y) | (y, Bit::Const(x)) => {
                if x {
                    !y
                } else {
                    y
                }
            }
            _ if a == b => FALSE,
            _ if a == !b => TRUE,
            _ => {
                let z = Bit::Lit(self.fresh());
                self.clause(&[!z, a, b]);
                self.clause(&[!z, !a, !b]);
                self.clause(&[z, !a, b]);
                self.clause(&[z, a, !b]);
                z
            }
        }
    }

    pub fn maj(&mut self, a: Bit, b: Bit, c: Bit) -> Bit {
        let mut lits = [a, b, c];
        if let Some(k) = lits.iter().position(|x| matches!(x, Bit::Const(_))) {
            let Bit::Const(v) = lits[k] else { unreachable!() };
            lits.swap(0, k);
            return if v { self.or(lits[1], lits[2]) } else { self.and(lits[1], lits[2]) };
        }
        for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
            if x == y {
                return x;
            }
            if x == !y {
                return z;
            }
        }
        let m = Bit::Lit(self.fresh());
        self.clause(&[!m, a, b]);
        self.clause(&[!m, a, c]);
        self.clause(&[!m, b, c]);
        self.clause(&[m, !a, !b]);
        self.clause(&[m, !a, !c]);
        self.clause(&[m, !b, !c]);
        m
    }

    /// `x + y + carry` modulo `2^width` (both words already of that width).
    pub fn add(&mut self, x: &[Bit], y: &[Bit], carry: Bit) -> Word {
        debug_assert_eq!(x.len(), y.len());
        let mut c = carry;
        let mut out = Vec::with_capacity(x.len());
        for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
            let t = self.xor(a, b);
            out.push(self.xor(t, c));
            if i + 1 < x.len() {
                c = self.maj(a, b, c);
            }
        }
        out
    }

    pub fn sub(&mut self, x: &[Bit], y: &[Bit]) -> Word {
        let ny: Word = y.iter().map(|&b| !b).collect();
        self.add(x, &ny, TRUE)
    }

    pub fn neg(&mut self, x: &[Bit]) -> Word {
        let nx: Word = x.iter().map(|&b| !b).collect();
        self.add(&nx, &vec![FALSE; x.len()], TRUE)
    }

    /// Output word equal to the candidate whose selector is true; exactly one
    /// selector must hold in every model.
    pub fn mux(&mut self, cands: &[(Bit, &Word)]) -> Word {
        let width = cands[0].1.len();
        let mut out = Vec::with_capacity(width);
        for t in 0..width {
            let first = cands[0].1[t];
            if cands.iter().all(|(_, w)| w[t] == first) {
                out.push(first);
                continue;
            }
            let o = Bit::Lit(self.fresh());
            for &(s, w) in cands {
                self.clause(&[!s, !w[t], o]);
                self.clause(&[!s, w[t], !o]);
            }
            out.push(o);
        }
        out
    }

    /// Require two words to be equal bit by bit.
    pub fn equal(&mut self, x: &[Bit], y: &[Bit]) {
        for (&a, &b) in x.iter().zip(y) {
            self.clause(&[!a, b]);
            self.clause(&[a, !b]);
        }
    }

    /// Require `x` to hold the two's-complement constant `v`; an
    /// unrepresentable `v` makes the instance contradictory.
    pub fn equal_const(&mut self, x: &[Bit], v: &BigInt) {
        match const_word(v, x.len()) {
            Some(c) => self.equal(x, &c),
            None => self.contradiction = true,
        }
    }

    pub fn finish(mut self, varmap: VarMap) -> CnfInstance {
        if self.contradiction {
            let x = self.fresh();
            self.clauses.push(vec![x]);
            self.clauses.push(vec![-x]);
        }
        CnfInstance { num_vars: self.num_vars, clauses: self.clauses, varmap }
    }
}

/// Two's-complement bits of `v` at `width`, if it fits.
pub fn const_word(v: &BigInt, width: usize) -> Option<Word> {
    let lim = BigInt::one() << (width - 1);
    if v >= &lim || v < &-lim.clone() {
        return None;
    }
    let m: BigInt = if v.is_negative() { v + (BigInt::one() << width) } else { v.clone() };
    Some((0..width).map(|t| Bit::Const(!((&m >> t) & BigInt::one()).is_zero())).collect())
}

/// Sign-extend or truncate to `width`.
pub fn resize(x: &[Bit], width: usize) -> Word {
    let sign = *x.last().expect("non-empty word");
    (0..width).map(|t| if t < x.len() { x[t] } else { sign }).collect()
}

/// `x · 2^k` modulo `2^width`.
pub fn shl(x: &[Bit], k: usize) -> Word {
    let w = x.len();
    (0..w).map(|t| if t < k { FALSE } else { x[t - k] }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emission_formats() {
        assert_eq!(emit_dimacs(&CnfInstance::default()), "p cnf 0 0\n");
        let one = CnfInstance { num_vars: 1, clauses: vec![vec![1]], varmap: VarMap::default() };
        assert_eq!(emit_dimacs(&one), "p cnf 1 1\n1 0\n");
        let w = WcnfInstance { hard: one, soft: vec![(1, vec![-1])] };
        assert_eq!(emit_wcnf(&w), "p wcnf 1 2 2\n2 1 0\n1 -1 0\n");
        assert_eq!(parse_dimacs(&emit_dimacs(&w.hard)).unwrap(), w.hard);
        assert_eq!(parse_wcnf(&emit_wcnf(&w)).unwrap(), w);
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs("1 0\n").is_err());
    }

    #[test]
    fn constant_folding() {
        let mut b = Builder::default();
        let x = Bit::Lit(b.fresh());
        assert_eq!(b.and(x, TRUE), x);
        assert_eq!(b.xor(x, x), FALSE);
        assert_eq!(b.xor(x, !x), TRUE);
        assert_eq!(b.maj(x, x, FALSE), x);
        let w = const_word(&BigInt::from(5), 4).unwrap();
        let v = const_word(&BigInt::from(-3), 4).unwrap();
        let s = b.add(&w, &v, FALSE);
        assert_eq!(s, const_word(&BigInt::from(2), 4).unwrap());
        assert_eq!(b.neg(&w), const_word(&BigInt::from(-5), 4).unwrap());
        assert!(b.clauses.is_empty());
        assert!(const_word(&BigInt::from(8), 4).is_none());
        assert!(const_word(&BigInt::from(-8), 4).is_some());
    }
}
