//! Exact arithmetic in Z[√2] and D[√2] = Z[1/√2].
//!
//! [`ZSqrt2`] is the integral ring, [`RingScalar`] a value `(a + b√2)/√2^k`
//! kept in least-denominator form, and [`Residue`] the parity image in
//! Z₂[√2] that drives column reduction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Element `a + b√2` of Z[√2].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ZSqrt2 {
    pub a: BigInt,
    pub b: BigInt,
}

impl ZSqrt2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        ZSqrt2 { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        ZSqrt2::default()
    }

    pub fn one() -> Self {
        ZSqrt2::new(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Galois conjugate `a − b√2`.
    pub fn conj(&self) -> Self {
        ZSqrt2 { a: self.a.clone(), b: -&self.b }
    }

    /// Field norm `a² − 2b²`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - (&self.b * &self.b) * 2
    }

    /// Multiply by √2: `(a + b√2)√2 = 2b + a√2`.
    pub fn mul_sqrt2(&self) -> Self {
        ZSqrt2 { a: &self.b * 2, b: self.a.clone() }
    }

    /// Multiply by `√2^e`.
    pub fn mul_sqrt2_pow(&self, e: u32) -> Self {
        let base = if e % 2 == 1 { self.mul_sqrt2() } else { self.clone() };
        let sh = (e / 2) as usize;
        ZSqrt2 { a: base.a << sh, b: base.b << sh }
    }

    /// Divide by √2 if the result stays integral.
    pub fn div_sqrt2(&self) -> Option<Self> {
        if self.a.is_even() {
            Some(ZSqrt2 { a: self.b.clone(), b: &self.a / 2 })
        } else {
            None
        }
    }

    /// Exact quotient in Z[√2], or `None` if `other` does not divide `self`.
    pub fn div_exact(&self, other: &ZSqrt2) -> Option<ZSqrt2> {
        let n = other.norm();
        if n.is_zero() {
            return None;
        }
        let p = self * &other.conj();
        let (qa, ra) = p.a.div_rem(&n);
        let (qb, rb) = p.b.div_rem(&n);
        if ra.is_zero() && rb.is_zero() {
            Some(ZSqrt2 { a: qa, b: qb })
        } else {
            None
        }
    }

    pub fn residue(&self) -> Residue {
        Residue { a: self.a.is_odd(), b: self.b.is_odd() }
    }

    /// Accurate `a + b√2` as a double, avoiding cancellation when the two
    /// terms have opposite signs.
    fn to_f64_raw(&self) -> Result<f64> {
        let fa = self.a.to_f64().filter(|x| x.is_finite()).ok_or(Error::Overflow)?;
        let fb = self.b.to_f64().filter(|x| x.is_finite()).ok_or(Error::Overflow)?;
        let same_sign = self.a.sign() == self.b.sign() || self.a.is_zero() || self.b.is_zero();
        if same_sign {
            return Ok(fa + fb * std::f64::consts::SQRT_2);
        }
        let num = self.norm().to_f64().filter(|x| x.is_finite());
        match num {
            Some(num) => Ok(num / (fa - fb * std::f64::consts::SQRT_2)),
            None => Ok(fa + fb * std::f64::consts::SQRT_2),
        }
    }
}

impl<'a> Add<&'a ZSqrt2> for &'a ZSqrt2 {
    type Output = ZSqrt2;
    fn add(self, o: &ZSqrt2) -> ZSqrt2 {
        ZSqrt2 { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a ZSqrt2> for &'a ZSqrt2 {
    type Output = ZSqrt2;
    fn sub(self, o: &ZSqrt2) -> ZSqrt2 {
        ZSqrt2 { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a ZSqrt2> for &'a ZSqrt2 {
    type Output = ZSqrt2;
    fn mul(self, o: &ZSqrt2) -> ZSqrt2 {
        ZSqrt2 {
            a: &self.a * &o.a + (&self.b * &o.b) * 2,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Neg for &ZSqrt2 {
    type Output = ZSqrt2;
    fn neg(self) -> ZSqrt2 {
        ZSqrt2 { a: -&self.a, b: -&self.b }
    }
}

impl fmt::Display for ZSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}√2", self.a, self.b)
    }
}

/// Image of an element of Z[√2] in Z₂[√2], written `ãb̃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    pub a: bool,
    pub b: bool,
}

impl Residue {
    pub const ZERO: Residue = Residue { a: false, b: false };

    pub fn from_bits(a: u8, b: u8) -> Self {
        Residue { a: a & 1 == 1, b: b & 1 == 1 }
    }

    /// `ã = 0`, i.e. the element is divisible by √2.
    pub fn is_reducible(self) -> bool {
        !self.a
    }

    /// Residue `00`, i.e. the element is divisible by 2.
    pub fn is_twice_reducible(self) -> bool {
        !self.a && !self.b
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, o: Residue) -> Residue {
        Residue { a: self.a ^ o.a, b: self.b ^ o.b }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, o: Residue) -> Residue {
        // (a1 + b1√2)(a2 + b2√2) = a1a2 + 2b1b2 + (a1b2 + a2b1)√2
        Residue { a: self.a & o.a, b: (self.a & o.b) ^ (self.b & o.a) }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.a as u8, self.b as u8)
    }
}

/// Exact element `(a + b√2)/√2^k` of D[√2] in least-denominator form.
///
/// Zero is stored as `(0, 0, 0)`, so structural equality is value equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RingScalar {
    num: ZSqrt2,
    k: u32,
}

impl RingScalar {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, k: u32) -> Self {
        Self::from_scaled(ZSqrt2::new(a, b), k)
    }

    /// The value `z/√2^k`, canonicalized.
    pub fn from_scaled(mut z: ZSqrt2, mut k: u32) -> Self {
        if z.is_zero() {
            return RingScalar::default();
        }
        while k > 0 {
            match z.div_sqrt2() {
                Some(q) => {
                    z = q;
                    k -= 1;
                }
                None => break,
            }
        }
        RingScalar { num: z, k }
    }

    pub fn zero() -> Self {
        RingScalar::default()
    }

    pub fn one() -> Self {
        RingScalar::from_int(1)
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        RingScalar { num: ZSqrt2::new(v, 0), k: 0 }
    }

    pub fn sqrt2() -> Self {
        RingScalar::new(0, 1, 0)
    }

    pub fn inv_sqrt2() -> Self {
        RingScalar::new(1, 0, 1)
    }

    pub fn a(&self) -> &BigInt {
        &self.num.a
    }

    pub fn b(&self) -> &BigInt {
        &self.num.b
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn numerator(&self) -> &ZSqrt2 {
        &self.num
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.k == 0 && self.num.a.is_one() && self.num.b.is_zero()
    }

    /// Least denominator exponent; 0 for zero.
    pub fn lde(&self) -> u32 {
        self.k
    }

    /// `√2^e · self` as an element of Z[√2], if `e ≥ lde`.
    pub fn scaled(&self, e: u32) -> Option<ZSqrt2> {
        if e < self.k {
            return None;
        }
        Some(self.num.mul_sqrt2_pow(e - self.k))
    }

    pub fn mul_sqrt2_pow(&self, e: u32) -> Self {
        if e <= self.k {
            RingScalar { num: self.num.clone(), k: self.k - e }
        } else {
            RingScalar::from_scaled(self.num.mul_sqrt2_pow(e - self.k), 0)
        }
    }

    pub fn div_sqrt2_pow(&self, e: u32) -> Self {
        RingScalar::from_scaled(self.num.clone(), self.k + e)
    }

    /// Residue of an element of Z[√2].
    pub fn residue(&self) -> Result<Residue> {
        if self.k != 0 {
            return Err(Error::Domain(format!("residue of {self} which is not in Z[√2]")));
        }
        Ok(self.num.residue())
    }

    /// Galois automorphism √2 ↦ −√2.
    ///
    /// On the tuple this is `(±a, ∓b, k)` with the sign `(−1)^k`, because
    /// `1/√2` maps to `−1/√2`.
    pub fn conj(&self) -> Self {
        let c = self.num.conj();
        let c = if self.k % 2 == 1 { -&c } else { c };
        RingScalar { num: c, k: self.k }
    }

    pub fn to_f64(&self) -> Result<f64> {
        // (a + b√2)/√2^k; for odd k rewrite as (2b + a√2)/2^{(k+1)/2}.
        let (z, half) = if self.k.is_multiple_of(2) {
            (self.num.clone(), self.k / 2)
        } else {
            (self.num.mul_sqrt2(), self.k.div_ceil(2))
        };
        let s = z.to_f64_raw()?;
        if half > 1000 {
            return Err(Error::Overflow);
        }
        Ok(s * 2f64.powi(-(half as i32)))
    }

    /// Textual form `a,b,k`.
    pub fn to_text(&self) -> String {
        format!("{},{},{}", self.num.a, self.num.b, self.k)
    }
}

impl FromStr for RingScalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected a,b,k, got {s:?}")));
        }
        let a: BigInt = parts[0].parse().map_err(|_| Error::Parse(format!("bad integer {:?}", parts[0])))?;
        let b: BigInt = parts[1].parse().map_err(|_| Error::Parse(format!("bad integer {:?}", parts[1])))?;
        let k: u32 = parts[2].parse().map_err(|_| Error::Parse(format!("bad exponent {:?}", parts[2])))?;
        Ok(RingScalar::new(a, b, k))
    }
}

impl fmt::Display for RingScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.num.b.is_negative() { "-" } else { "+" };
        write!(f, "({}{}{}√2)/√2^{}", self.num.a, sign, self.num.b.abs(), self.k)
    }
}

fn align(x: &RingScalar, y: &RingScalar) -> (ZSqrt2, ZSqrt2, u32) {
    let k = x.k.max(y.k);
    (x.num.mul_sqrt2_pow(k - x.k), y.num.mul_sqrt2_pow(k - y.k), k)
}

impl<'a> Add<&'a RingScalar> for &'a RingScalar {
    type Output = RingScalar;
    fn add(self, o: &RingScalar) -> RingScalar {
        if self.k == o.k {
            return RingScalar::from_scaled(&self.num + &o.num, self.k);
        }
        let (p, q, k) = align(self, o);
        RingScalar::from_scaled(&p + &q, k)
    }
}

impl<'a> Sub<&'a RingScalar> for &'a RingScalar {
    type Output = RingScalar;
    fn sub(self, o: &RingScalar) -> RingScalar {
        if self.k == o.k {
            return RingScalar::from_scaled(&self.num - &o.num, self.k);
        }
        let (p, q, k) = align(self, o);
        RingScalar::from_scaled(&p - &q, k)
    }
}

impl<'a> Mul<&'a RingScalar> for &'a RingScalar {
    type Output = RingScalar;
    fn mul(self, o: &RingScalar) -> RingScalar {
        if self.is_zero() || o.is_zero() {
            return RingScalar::zero();
        }
        RingScalar::from_scaled(&self.num * &o.num, self.k + o.k)
    }
}

impl Neg for &RingScalar {
    type Output = RingScalar;
    fn neg(self) -> RingScalar {
        RingScalar { num: -&self.num, k: self.k }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RingScalar> for RingScalar {
            type Output = RingScalar;
            fn $m(self, o: RingScalar) -> RingScalar {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RingScalar {
    type Output = RingScalar;
    fn neg(self) -> RingScalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(a: i64, b: i64, k: u32) -> RingScalar {
        RingScalar::new(a, b, k)
    }

    #[test]
    fn add_examples() {
        assert_eq!(&RingScalar::one() + &RingScalar::sqrt2(), rs(1, 1, 0));
        assert_eq!(&rs(1, 1, 2) + &rs(1, -1, 2), RingScalar::one());
        let s = &rs(1, 0, 1) + &rs(1, 0, 1);
        assert_eq!(s, RingScalar::sqrt2());
        assert_eq!((s.a().clone(), s.b().clone(), s.k()), (BigInt::from(0), BigInt::from(1), 0));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&rs(1, 1, 0) * &rs(1, -1, 0), RingScalar::from_int(-1));
        assert_eq!(&rs(1, 0, 1) * &rs(1, 0, 1), rs(1, 0, 2));
        assert_eq!(rs(1, 0, 2).k(), 2);
        assert_eq!(&rs(1, 2, 0) * &rs(3, 1, 0), rs(7, 7, 0));
    }

    #[test]
    fn lde_examples() {
        assert_eq!(rs(1, 1, 2).lde(), 2);
        assert_eq!(RingScalar::from_int(7).lde(), 0);
        assert_eq!(rs(3, 0, 1).lde(), 1);
        assert_eq!(RingScalar::zero().lde(), 0);
        // 2/√2^2 = 1
        assert_eq!(rs(2, 0, 2), RingScalar::one());
    }

    #[test]
    fn residue_examples() {
        assert_eq!(rs(1, 2, 0).residue().unwrap().to_string(), "10");
        assert_eq!(rs(2, 4, 0).residue().unwrap().to_string(), "00");
        assert_eq!(rs(3, 5, 0).residue().unwrap().to_string(), "11");
        assert!(rs(1, 0, 1).residue().is_err());
    }

    #[test]
    fn reducibility() {
        let r00 = Residue::from_bits(0, 0);
        let r01 = Residue::from_bits(0, 1);
        let r10 = Residue::from_bits(1, 0);
        assert!(r00.is_reducible() && r00.is_twice_reducible());
        assert!(r01.is_reducible() && !r01.is_twice_reducible());
        assert!(!r10.is_reducible());
        // 2 + √2 has residue 01 and is divisible by √2
        let w = ZSqrt2::new(2, 1);
        assert_eq!(w.residue(), r01);
        assert!(w.div_sqrt2().is_some());
    }

    #[test]
    fn to_float_examples() {
        assert_eq!(rs(1, 0, 1).to_f64().unwrap(), std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(RingScalar::zero().to_f64().unwrap(), 0.0);
        assert_eq!(rs(3, 1, 2).to_f64().unwrap(), 2.2071067811865475);
        let huge = RingScalar::new(BigInt::from(1) << 1100usize, 0, 1);
        assert!(matches!(huge.to_f64(), Err(Error::Overflow)));
    }

    #[test]
    fn text_forms() {
        let x = rs(3, -1, 2);
        assert_eq!(x.to_text(), "3,-1,2");
        assert_eq!(x.to_string(), "(3-1√2)/√2^2");
        assert_eq!("3,-1,2".parse::<RingScalar>().unwrap(), x);
        assert!("3,1".parse::<RingScalar>().is_err());
    }

    #[test]
    fn conj_is_galois() {
        let x = rs(1, 0, 1);
        assert_eq!(x.conj(), -&x);
        let y = RingScalar::from_int(2);
        assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
    }

    #[test]
    fn div_exact_in_zsqrt2() {
        let x = ZSqrt2::new(7, 7);
        let y = ZSqrt2::new(1, 2);
        assert_eq!(x.div_exact(&y), Some(ZSqrt2::new(3, 1)));
        assert_eq!(ZSqrt2::new(1, 0).div_exact(&ZSqrt2::new(2, 0)), None);
    }
}
