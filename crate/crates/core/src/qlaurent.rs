//! Exact Laurent polynomials in one variable `q` over Z, Q or F_p, together
//! with quantum integers, cyclotomic polynomials and their display.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{fp, zp};
use crate::tableaux::Partition;

/// Largest prime accepted as a field characteristic (keeps products in `u128`).
pub const MAX_PRIME: u64 = (1 << 31) - 1;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoeffRing {
    Integers,
    Rationals,
    PrimeField(u64),
}

impl CoeffRing {
    pub fn prime_field(p: u64) -> Result<Self> {
        if is_prime(p) && p <= MAX_PRIME {
            Ok(CoeffRing::PrimeField(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn is_field(self) -> bool {
        !matches!(self, CoeffRing::Integers)
    }

    pub fn characteristic(self) -> u64 {
        match self {
            CoeffRing::PrimeField(p) => p,
            _ => 0,
        }
    }

    /// Tag used in JSON: `Z`, `Q` or `Fp:<p>`.
    pub fn tag(self) -> String {
        match self {
            CoeffRing::Integers => "Z".to_string(),
            CoeffRing::Rationals => "Q".to_string(),
            CoeffRing::PrimeField(p) => format!("Fp:{p}"),
        }
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for CoeffRing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" => Ok(CoeffRing::Integers),
            "Q" => Ok(CoeffRing::Rationals),
            _ => {
                let rest = s
                    .strip_prefix("Fp:")
                    .or_else(|| s.strip_prefix('F'))
                    .ok_or_else(|| Error::UnknownRing(s.to_string()))?;
                let p: u64 = rest.parse().map_err(|_| Error::UnknownRing(s.to_string()))?;
                CoeffRing::prime_field(p)
            }
        }
    }
}

impl Serialize for CoeffRing {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.tag())
    }
}

impl<'de> Deserialize<'de> for CoeffRing {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A Laurent polynomial `sum c_e q^e` with finitely many nonzero coefficients.
///
/// Stored densely as integer numerators from `q^low` upwards over a common
/// positive denominator. The denominator is 1 unless the ring is Q, and over
/// F_p the numerators are reduced into `0..p`. Every value has a unique
/// representation, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    ring: CoeffRing,
    low: i64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl LaurentPoly {
    pub fn zero(ring: CoeffRing) -> Self {
        LaurentPoly { ring, low: 0, num: Vec::new(), den: BigInt::one() }
    }

    pub fn one(ring: CoeffRing) -> Self {
        Self::monomial(ring, BigInt::one(), 0)
    }

    /// The indeterminate `q`.
    pub fn q(ring: CoeffRing) -> Self {
        Self::monomial(ring, BigInt::one(), 1)
    }

    pub fn monomial(ring: CoeffRing, c: impl Into<BigInt>, exp: i64) -> Self {
        Self::from_parts(ring, exp, vec![c.into()], BigInt::one())
    }

    pub fn constant(ring: CoeffRing, c: impl Into<BigInt>) -> Self {
        Self::monomial(ring, c, 0)
    }

    /// `q^exp` times `c0 + c1 q + c2 q^2 + ...`.
    pub fn from_coeffs(ring: CoeffRing, low: i64, coeffs: &[i64]) -> Self {
        Self::from_parts(ring, low, coeffs.iter().map(|c| BigInt::from(*c)).collect(), BigInt::one())
    }

    pub fn from_bigint_coeffs(ring: CoeffRing, low: i64, coeffs: Vec<BigInt>) -> Self {
        Self::from_parts(ring, low, coeffs, BigInt::one())
    }

    /// Builds a polynomial from rational coefficients, mapping them into `ring`.
    pub fn from_terms<I>(ring: CoeffRing, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut out = Self::zero(ring);
        for (e, c) in terms {
            let c = map_rational(&c, ring)?;
            out += &Self::from_parts(ring, e, vec![c.0], c.1);
        }
        Ok(out)
    }

    fn from_parts(ring: CoeffRing, low: i64, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut p = LaurentPoly { ring, low, num, den };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        if let CoeffRing::PrimeField(p) = self.ring {
            let pb = BigInt::from(p);
            if !self.den.is_one() {
                let d = self.den.mod_floor(&pb).to_u64().unwrap();
                assert!(d != 0, "denominator divisible by the characteristic");
                let inv = BigInt::from(fp::inv_scalar(d, p));
                for c in self.num.iter_mut() {
                    *c *= &inv;
                }
                self.den = BigInt::one();
            }
            for c in self.num.iter_mut() {
                *c = c.mod_floor(&pb);
            }
        }
        zp::trim(&mut self.num);
        let lead_zeros = self.num.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            self.num.drain(..lead_zeros);
            self.low += lead_zeros as i64;
        }
        if self.num.is_empty() {
            self.low = 0;
            self.den = BigInt::one();
            return;
        }
        if self.ring == CoeffRing::Rationals {
            if self.den.is_negative() {
                self.den = -std::mem::take(&mut self.den);
                for c in self.num.iter_mut() {
                    *c = -std::mem::take(c);
                }
            }
            if !self.den.is_one() {
                let g = zp::content(&self.num).gcd(&self.den);
                if !g.is_one() {
                    for c in self.num.iter_mut() {
                        *c /= &g;
                    }
                    self.den /= &g;
                }
            }
        } else {
            debug_assert!(self.den.is_one());
        }
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.num.len() == 1 && self.num[0].is_one() && self.den.is_one()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn low_exp(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn high_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.num.len() as i64 - 1)
    }

    /// `high_exp - low_exp`; the Euclidean size over a field.
    pub fn span(&self) -> Option<usize> {
        (!self.is_zero()).then(|| self.num.len() - 1)
    }

    pub fn num_terms(&self) -> usize {
        self.num.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn coeff(&self, exp: i64) -> BigRational {
        let i = exp - self.low;
        if i < 0 || i as usize >= self.num.len() {
            return BigRational::zero();
        }
        BigRational::new(self.num[i as usize].clone(), self.den.clone())
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, BigRational)> + '_ {
        self.num.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| {
            (self.low + i as i64, BigRational::new(c.clone(), self.den.clone()))
        })
    }

    /// Integer coefficients; `None` if some coefficient is not an integer.
    pub fn integer_terms(&self) -> Option<Vec<(i64, BigInt)>> {
        if !self.den.is_one() {
            return None;
        }
        Some(
            self.num
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (self.low + i as i64, c.clone()))
                .collect(),
        )
    }

    fn check_ring(&self, other: &Self) {
        assert_eq!(self.ring, other.ring, "coefficient ring mismatch: {} vs {}", self.ring, other.ring);
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut r = self.clone();
        if !r.is_zero() {
            r.low += k;
        }
        r
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_parts(self.ring, self.low, self.num.iter().map(|x| x * c).collect(), self.den.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(self.ring);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Reinterprets the polynomial over another coefficient ring.
    pub fn to_ring(&self, ring: CoeffRing) -> Result<Self> {
        if ring == self.ring {
            return Ok(self.clone());
        }
        match (self.ring, ring) {
            (CoeffRing::PrimeField(_), _) => Err(Error::NotRepresentable { value: self.to_string(), ring: ring.tag() }),
            (_, CoeffRing::Integers) if !self.den.is_one() => {
                Err(Error::NotRepresentable { value: self.to_string(), ring: ring.tag() })
            }
            (_, CoeffRing::PrimeField(p)) if (&self.den % BigInt::from(p)).is_zero() => {
                Err(Error::NotRepresentable { value: self.to_string(), ring: ring.tag() })
            }
            _ => Ok(Self::from_parts(ring, self.low, self.num.clone(), self.den.clone())),
        }
    }

    /// Coefficient sum (the value at `q = 1`); only over Z or Q.
    pub fn at_one(&self) -> Result<BigRational> {
        if let CoeffRing::PrimeField(_) = self.ring {
            return Err(Error::NotRepresentable { value: self.to_string(), ring: "Q".into() });
        }
        let s: BigInt = self.num.iter().sum();
        Ok(BigRational::new(s, self.den.clone()))
    }

    /// Value at `q = q0` for a point of F_p (ring must be F_p).
    pub fn eval_mod_p(&self, q0: u64) -> Result<u64> {
        let CoeffRing::PrimeField(p) = self.ring else {
            return Err(Error::NotAField(self.ring.tag()));
        };
        let q0 = q0 % p;
        if q0 == 0 && self.low < 0 {
            return Err(Error::NotRepresentable { value: self.to_string(), ring: "q = 0".into() });
        }
        let mut acc = 0u64;
        for (i, c) in self.num.iter().enumerate().rev() {
            let c = c.to_u64().unwrap();
            acc = ((acc as u128 * q0 as u128 + c as u128) % p as u128) as u64;
            let _ = i;
        }
        let shift = if self.low >= 0 {
            fp::pow_scalar(q0, self.low as u64, p)
        } else {
            fp::inv_scalar(fp::pow_scalar(q0, (-self.low) as u64, p), p)
        };
        Ok(((acc as u128 * shift as u128) % p as u128) as u64)
    }

    /// Applies a specialization: `q -> 1` or reduction of an integral polynomial mod p.
    pub fn specialize(&self, target: Specialization) -> Result<Specialized> {
        match target {
            Specialization::AtOne => self.at_one().map(Specialized::Value),
            Specialization::ModPrime(p) => {
                if self.ring != CoeffRing::Integers {
                    return Err(Error::NotRepresentable { value: self.to_string(), ring: format!("Fp:{p}") });
                }
                self.to_ring(CoeffRing::prime_field(p)?).map(Specialized::Poly)
            }
        }
    }

    /// Canonical associate: lowest exponent 0 and monic over a field, positive
    /// leading coefficient over Z. Returns `(unit, canonical)` with
    /// `self = unit * canonical`; the unit is a monomial (integer content is
    /// kept inside the canonical part over Z).
    pub fn canonical_split(&self) -> (LaurentPoly, LaurentPoly) {
        if self.is_zero() {
            return (Self::one(self.ring), self.clone());
        }
        let lead = self.num.last().unwrap().clone();
        match self.ring {
            CoeffRing::Integers => {
                let sign = if lead.is_negative() { -BigInt::one() } else { BigInt::one() };
                let unit = Self::monomial(self.ring, sign.clone(), self.low);
                let canon = Self::from_parts(self.ring, 0, self.num.iter().map(|c| c * &sign).collect(), BigInt::one());
                (unit, canon)
            }
            CoeffRing::Rationals => {
                let unit = Self::from_parts(self.ring, self.low, vec![lead.clone()], self.den.clone());
                let canon = Self::from_parts(self.ring, 0, self.num.clone(), lead);
                (unit, canon)
            }
            CoeffRing::PrimeField(p) => {
                let l = lead.to_u64().unwrap();
                let inv = BigInt::from(fp::inv_scalar(l, p));
                let unit = Self::monomial(self.ring, lead, self.low);
                let canon = Self::from_parts(self.ring, 0, self.num.iter().map(|c| c * &inv).collect(), BigInt::one());
                (unit, canon)
            }
        }
    }

    pub fn canonical(&self) -> LaurentPoly {
        self.canonical_split().1
    }

    /// Is this a unit of the Laurent ring (`c q^a` with `c` invertible)?
    pub fn is_unit(&self) -> bool {
        if self.num_terms() != 1 {
            return false;
        }
        match self.ring {
            CoeffRing::Integers => self.num.last().unwrap().abs().is_one(),
            _ => true,
        }
    }

    /// Equality up to a unit of the Laurent ring.
    pub fn associate_of(&self, other: &Self) -> bool {
        self.check_ring(other);
        if self.ring == CoeffRing::Integers {
            // over Z the units are +-q^a only
            let (_, a) = self.canonical_split();
            let (_, b) = other.canonical_split();
            return a == b;
        }
        self.canonical() == other.canonical()
    }

    /// Exact quotient `self / d`; `None` when `d` does not divide `self` in the
    /// Laurent ring over the same coefficients.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        self.check_ring(d);
        assert!(!d.is_zero(), "division by zero");
        if self.is_zero() {
            return Some(self.clone());
        }
        match self.ring {
            CoeffRing::PrimeField(p) => {
                let a: Vec<u64> = self.num.iter().map(|c| c.to_u64().unwrap()).collect();
                let b: Vec<u64> = d.num.iter().map(|c| c.to_u64().unwrap()).collect();
                let (q, r) = fp::divrem(&a, &b, p);
                if !r.is_empty() {
                    return None;
                }
                Some(Self::from_parts(self.ring, self.low - d.low, q.into_iter().map(BigInt::from).collect(), BigInt::one()))
            }
            CoeffRing::Integers => {
                let q = zp::div_exact(&self.num, &d.num)?;
                Some(Self::from_parts(self.ring, self.low - d.low, q, BigInt::one()))
            }
            CoeffRing::Rationals => {
                let g = d.num.last().unwrap();
                let (e, q, r) = zp::pseudo_divrem(&self.num, &d.num);
                if !r.is_empty() {
                    return None;
                }
                // lc^e * a = q * b  =>  (a_num/a_den) / (b_num/b_den) = q * b_den / (lc^e * a_den)
                let den = g.pow(e) * &self.den;
                let num = zp::scale(&q, &d.den);
                Some(Self::from_parts(self.ring, self.low - d.low, num, den))
            }
        }
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div_exact(self).is_some()
    }

    /// Dense integer numerators starting at `q^low` (for internal kernels).
    pub(crate) fn numerators(&self) -> (i64, &[BigInt]) {
        (self.low, &self.num)
    }

    pub(crate) fn to_fp_dense(&self) -> (i64, Vec<u64>) {
        assert!(matches!(self.ring, CoeffRing::PrimeField(_)));
        (self.low, self.num.iter().map(|c| c.to_u64().unwrap()).collect())
    }

    pub(crate) fn from_fp_dense(p: u64, low: i64, c: Vec<u64>) -> Self {
        Self::from_parts(CoeffRing::PrimeField(p), low, c.into_iter().map(BigInt::from).collect(), BigInt::one())
    }
}

/// Target of [`LaurentPoly::specialize`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Specialization {
    AtOne,
    ModPrime(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Specialized {
    Value(BigRational),
    Poly(LaurentPoly),
}

fn map_rational(c: &BigRational, ring: CoeffRing) -> Result<(BigInt, BigInt)> {
    match ring {
        CoeffRing::Integers if !c.denom().is_one() => {
            Err(Error::NotRepresentable { value: c.to_string(), ring: ring.tag() })
        }
        CoeffRing::PrimeField(p) if (c.denom() % BigInt::from(p)).is_zero() => {
            Err(Error::NotRepresentable { value: c.to_string(), ring: ring.tag() })
        }
        _ => Ok((c.numer().clone(), c.denom().clone())),
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        combine(self, rhs, false)
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        combine(self, rhs, true)
    }
}

fn combine(a: &LaurentPoly, b: &LaurentPoly, negate: bool) -> LaurentPoly {
    a.check_ring(b);
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return if negate { -b } else { b.clone() };
    }
    let low = a.low.min(b.low);
    let high = (a.low + a.num.len() as i64).max(b.low + b.num.len() as i64);
    let mut num = vec![BigInt::zero(); (high - low) as usize];
    let same_den = a.den == b.den;
    let oa = (a.low - low) as usize;
    for (i, c) in a.num.iter().enumerate() {
        if same_den {
            num[oa + i] += c;
        } else {
            num[oa + i] += c * &b.den;
        }
    }
    let ob = (b.low - low) as usize;
    for (i, c) in b.num.iter().enumerate() {
        let t = if same_den { c.clone() } else { c * &a.den };
        if negate {
            num[ob + i] -= t;
        } else {
            num[ob + i] += t;
        }
    }
    let den = if same_den { a.den.clone() } else { &a.den * &b.den };
    LaurentPoly::from_parts(a.ring, low, num, den)
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.check_ring(rhs);
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero(self.ring);
        }
        let num = zp::mul(&self.num, &rhs.num);
        LaurentPoly::from_parts(self.ring, self.low + rhs.low, num, &self.den * &rhs.den)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly::from_parts(self.ring, self.low, self.num.iter().map(|c| -c).collect(), self.den.clone())
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&LaurentPoly> for LaurentPoly {
    fn mul_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let coeff = if a.is_integer() { a.numer().to_string() } else { format!("({a})") };
            match e {
                0 => f.write_str(&coeff)?,
                _ => {
                    if !a.is_one() {
                        f.write_str(&coeff)?;
                    }
                    if e == 1 {
                        f.write_str("q")?;
                    } else {
                        write!(f, "q^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.ring, self)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Coeffs<'a>(&'a LaurentPoly);
        impl Serialize for Coeffs<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                let terms: Vec<_> = self.0.terms().collect();
                let mut m = serializer.serialize_map(Some(terms.len()))?;
                for (e, c) in terms {
                    m.serialize_entry(&e.to_string(), &c.to_string())?;
                }
                m.end()
            }
        }
        let mut m = serializer.serialize_map(Some(2))?;
        m.serialize_entry("ring", &self.ring.tag())?;
        m.serialize_entry("coeffs", &Coeffs(self))?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = LaurentPoly;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a Laurent polynomial object with `ring` and `coeffs`")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<LaurentPoly, A::Error> {
                let mut ring: Option<CoeffRing> = None;
                let mut coeffs: Option<BTreeMap<String, String>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "ring" => {
                            let s: String = map.next_value()?;
                            ring = Some(s.parse().map_err(de::Error::custom)?);
                        }
                        "coeffs" => coeffs = Some(map.next_value()?),
                        other => return Err(de::Error::unknown_field(other, &["ring", "coeffs"])),
                    }
                }
                let ring = ring.ok_or_else(|| de::Error::missing_field("ring"))?;
                let coeffs = coeffs.ok_or_else(|| de::Error::missing_field("coeffs"))?;
                let mut terms = Vec::with_capacity(coeffs.len());
                for (e, c) in coeffs {
                    let e: i64 = e.parse().map_err(|_| de::Error::custom(format!("bad exponent `{e}`")))?;
                    let c: BigRational = c.parse().map_err(|_| de::Error::custom(format!("bad coefficient `{c}`")))?;
                    terms.push((e, c));
                }
                LaurentPoly::from_terms(ring, terms).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// `[k]_q = 1 + q + ... + q^(k-1)`; zero for `k = 0`.
pub fn quantum_integer(k: usize, ring: CoeffRing) -> LaurentPoly {
    LaurentPoly::from_bigint_coeffs(ring, 0, vec![BigInt::one(); k])
}

/// `[k]_q^! = [1]_q [2]_q ... [k]_q`, with `[0]_q^! = 1`.
pub fn quantum_factorial(k: usize, ring: CoeffRing) -> LaurentPoly {
    (1..=k).fold(LaurentPoly::one(ring), |acc, i| &acc * &quantum_integer(i, ring))
}

/// `binom(m, k)` for any integer `m`, with `binom(m, k) = 0` for `k < 0`.
pub fn binomial(m: i64, k: i64) -> i64 {
    if k < 0 {
        return 0;
    }
    let mut r: i128 = 1;
    for i in 0..k as i128 {
        r = r * (m as i128 - i) / (i + 1);
    }
    r as i64
}

/// The m-th cyclotomic polynomial over Z, as `prod_{d | m} (q^d - 1)^mu(m/d)`.
pub fn cyclotomic(m: usize) -> LaurentPoly {
    assert!(m >= 1, "cyclotomic index must be positive");
    thread_local! {
        static CACHE: std::cell::RefCell<std::collections::HashMap<usize, LaurentPoly>> = Default::default();
    }
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&m).cloned()) {
        return hit;
    }
    let binom_minus_one = |d: usize| {
        let mut v = vec![BigInt::zero(); d + 1];
        v[0] = -BigInt::one();
        v[d] = BigInt::one();
        v
    };
    let mut numer = vec![BigInt::one()];
    let mut denom = vec![BigInt::one()];
    for d in (1..=m).filter(|d| m % d == 0) {
        match mobius(m / d) {
            1 => numer = zp::mul(&numer, &binom_minus_one(d)),
            -1 => denom = zp::mul(&denom, &binom_minus_one(d)),
            _ => {}
        }
    }
    let f = zp::div_exact(&numer, &denom).expect("cyclotomic product divides exactly");
    let out = LaurentPoly::from_bigint_coeffs(CoeffRing::Integers, 0, f);
    CACHE.with(|c| c.borrow_mut().insert(m, out.clone()));
    out
}

fn mobius(mut n: usize) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Euler's totient.
pub fn totient(mut n: usize) -> usize {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// Unicode superscript digits.
pub fn superscript(e: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    e.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

/// `Phi_m` mapped into `ring`.
pub fn cyclotomic_in(m: usize, ring: CoeffRing) -> LaurentPoly {
    cyclotomic(m).to_ring(ring).expect("integer polynomial maps into every ring")
}

/// `h_lambda(q)`: the product of `[h]_q` over all hook lengths `h` of `lambda`.
pub fn hook_polynomial(lambda: &Partition, ring: CoeffRing) -> LaurentPoly {
    lambda
        .hook_lengths()
        .values()
        .fold(LaurentPoly::one(ring), |acc, h| &acc * &quantum_integer(*h, ring))
}

/// Canonical gcd over a field: lowest exponent 0 and monic.
pub fn normalize_and_gcd(f: &LaurentPoly, g: &LaurentPoly) -> Result<LaurentPoly> {
    f.check_ring(g);
    let ring = f.ring();
    if !ring.is_field() {
        return Err(Error::NotAField(ring.tag()));
    }
    if f.is_zero() && g.is_zero() {
        return Err(Error::GcdOfZeros);
    }
    if g.is_zero() {
        return Ok(f.canonical());
    }
    if f.is_zero() {
        return Ok(g.canonical());
    }
    match ring {
        CoeffRing::PrimeField(p) => {
            let (_, a) = f.to_fp_dense();
            let (_, b) = g.to_fp_dense();
            Ok(LaurentPoly::from_fp_dense(p, 0, fp::gcd(&a, &b, p)).canonical())
        }
        _ => {
            let h = zp::gcd_primitive(f.numerators().1, g.numerators().1);
            Ok(LaurentPoly::from_bigint_coeffs(ring, 0, h).canonical())
        }
    }
}

/// Display form `unit * prod Phi_m^e * remainder` of a nonzero polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycloDisplay {
    /// Constant part of the unit: +-1 over Z, a nonzero scalar over a field.
    pub unit_coeff: BigRationalString,
    /// Power of `q` in the unit.
    pub unit_exp: i64,
    /// `(m, e)` meaning `Phi_m^e`, in the order they were divided out.
    pub factors: Vec<(usize, u32)>,
    /// What is left after trial division; 1 when fully factored.
    pub remainder: LaurentPoly,
}

/// Rational scalar rendered as a decimal string in JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigRationalString(pub BigRational);

impl Serialize for BigRationalString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

impl CycloDisplay {
    /// Multiplies the pieces back together.
    pub fn reassemble(&self) -> LaurentPoly {
        let ring = self.remainder.ring();
        let mut out = LaurentPoly::from_terms(ring, [(self.unit_exp, self.unit_coeff.0.clone())]).expect("unit maps into its ring");
        for (m, e) in &self.factors {
            out = &out * &cyclotomic_in(*m, ring).pow(*e);
        }
        &out * &self.remainder
    }

    pub fn is_fully_factored(&self) -> bool {
        self.remainder.is_one()
    }
}

impl fmt::Display for CycloDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (m, e) in &self.factors {
            out.push_str(&format!("Φ{m}"));
            if *e > 1 {
                out.push_str(&superscript(*e));
            }
        }
        if !self.remainder.is_one() {
            out.push_str(&format!("({})", self.remainder));
        }
        if out.is_empty() {
            out.push('1');
        }
        f.write_str(&out)
    }
}

/// Trial division by `Phi_m` (reduced into the coefficient ring) for
/// `m = 2..=max_m` and then `m = 1`, each taken as often as it divides.
///
/// Over F_p distinct cyclotomics can share factors (`Phi_1 = Phi_2` mod 2,
/// `Phi_4 = Phi_2^2` mod 2); trying `Phi_1` last keeps `q + 1` labelled
/// `Phi_2` in characteristic 2.
pub fn cyclo_display(f: &LaurentPoly, max_m: usize) -> CycloDisplay {
    assert!(!f.is_zero(), "cyclo_display of zero");
    let ring = f.ring();
    let (unit, mut rest) = f.canonical_split();
    let (unit_exp, unit_coeff) = unit.terms().next().expect("unit is a monomial");
    let mut factors = Vec::new();
    let order = (2..=max_m).chain(std::iter::once(1));
    for m in order {
        if rest.span() == Some(0) {
            break;
        }
        if totient(m) > rest.span().unwrap_or(0) {
            continue;
        }
        let phi = cyclotomic_in(m, ring);
        let mut e = 0;
        while let Some(q) = rest.div_exact(&phi) {
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((m, e));
        }
    }
    CycloDisplay { unit_coeff: BigRationalString(unit_coeff), unit_exp, factors, remainder: rest }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: CoeffRing = CoeffRing::Integers;
    const Q: CoeffRing = CoeffRing::Rationals;

    fn zp(c: &[i64]) -> LaurentPoly {
        LaurentPoly::from_coeffs(Z, 0, c)
    }

    #[test]
    fn quantum_integers_and_factorials() {
        assert!(quantum_integer(0, Z).is_zero());
        assert!(quantum_integer(1, Z).is_one());
        assert_eq!(quantum_integer(3, Z), zp(&[1, 1, 1]));
        assert_eq!(quantum_integer(5, Z).at_one().unwrap(), BigRational::from_integer(5.into()));
        assert!(quantum_factorial(0, Z).is_one());
        assert!(quantum_factorial(1, Z).is_one());
        assert_eq!(quantum_factorial(3, Z), zp(&[1, 2, 2, 1]));
        assert_eq!(quantum_factorial(4, Z).at_one().unwrap(), BigRational::from_integer(24.into()));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(-1, 0), 1);
        assert_eq!(binomial(4, -1), 0);
        assert_eq!(binomial(7, 7), 1);
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), zp(&[-1, 1]));
        assert_eq!(cyclotomic(2), zp(&[1, 1]));
        assert_eq!(cyclotomic(4), zp(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), zp(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), zp(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn cyclotomic_product_identity() {
        for m in 1..=30 {
            let mut prod = LaurentPoly::one(Z);
            for d in (1..=m).filter(|d| m % d == 0) {
                prod = &prod * &cyclotomic(d);
            }
            let mut target = vec![0i64; m + 1];
            target[0] = -1;
            target[m] = 1;
            assert_eq!(prod, zp(&target), "m = {m}");
        }
    }

    #[test]
    fn display_of_quantum_six() {
        let d = cyclo_display(&quantum_integer(6, Q), 12);
        assert_eq!(d.factors, vec![(2, 1), (3, 1), (6, 1)]);
        assert!(d.is_fully_factored());
        assert_eq!(d.to_string(), "Φ2Φ3Φ6");
    }

    #[test]
    fn display_extracts_q_power() {
        let f = zp(&[1, 1]).shift(3);
        let d = cyclo_display(&f, 6);
        assert_eq!(d.unit_exp, 3);
        assert_eq!(d.factors, vec![(2, 1)]);
        assert_eq!(d.reassemble(), f);
    }

    #[test]
    fn display_in_characteristic_two() {
        let f2 = CoeffRing::prime_field(2).unwrap();
        let f = cyclotomic_in(4, f2);
        let d = cyclo_display(&f, 8);
        assert_eq!(d.factors, vec![(2, 2)]);
        assert_eq!(d.reassemble(), f);
    }

    #[test]
    fn display_keeps_unfactored_remainder() {
        let f = zp(&[2, 2]);
        let d = cyclo_display(&f, 4);
        assert_eq!(d.factors, vec![(2, 1)]);
        assert_eq!(d.remainder, zp(&[2]));
        assert_eq!(d.reassemble(), f);
        let g = zp(&[1, 0, 0, 1, 1]).shift(-2);
        let d = cyclo_display(&g, 10);
        assert_eq!(d.reassemble(), g);
    }

    #[test]
    fn specializations() {
        assert_eq!(
            quantum_integer(7, Z).specialize(Specialization::AtOne).unwrap(),
            Specialized::Value(BigRational::from_integer(7.into()))
        );
        let f2 = CoeffRing::prime_field(2).unwrap();
        let r = cyclotomic(4).specialize(Specialization::ModPrime(2)).unwrap();
        let expect = LaurentPoly::from_coeffs(f2, 0, &[1, 1]).pow(2);
        assert_eq!(r, Specialized::Poly(expect));
        assert!(quantum_integer(3, Q).specialize(Specialization::ModPrime(3)).is_err());
    }

    #[test]
    fn gcds() {
        let a = LaurentPoly::from_coeffs(Q, 0, &[-1, 1]);
        let b = LaurentPoly::from_coeffs(Q, 0, &[1, 1]);
        assert!(normalize_and_gcd(&a, &b).unwrap().is_one());
        let f2 = CoeffRing::prime_field(2).unwrap();
        let a2 = a.to_ring(f2).unwrap();
        let b2 = b.to_ring(f2).unwrap();
        assert_eq!(normalize_and_gcd(&a2, &b2).unwrap(), b2);
        let c = LaurentPoly::from_coeffs(Q, -3, &[2, 4]);
        assert_eq!(normalize_and_gcd(&c, &LaurentPoly::zero(Q)).unwrap(), LaurentPoly::from_terms(Q, [(0, BigRational::new(1.into(), 2.into())), (1, BigRational::one())]).unwrap());
        assert_eq!(normalize_and_gcd(&LaurentPoly::zero(Q), &LaurentPoly::zero(Q)), Err(Error::GcdOfZeros));
        assert!(matches!(normalize_and_gcd(&zp(&[1]), &zp(&[1])), Err(Error::NotAField(_))));
    }

    #[test]
    fn exact_division() {
        let f = &quantum_integer(6, Z) * &LaurentPoly::q(Z).pow(2);
        assert_eq!(f.div_exact(&cyclotomic(3)).unwrap(), (&cyclotomic(2) * &cyclotomic(6)).shift(2));
        assert!(f.div_exact(&cyclotomic(4)).is_none());
        assert!(zp(&[2]).div_exact(&zp(&[3])).is_none());
        let fq = zp(&[2]).to_ring(Q).unwrap();
        assert!(fq.div_exact(&zp(&[3]).to_ring(Q).unwrap()).is_some());
    }

    #[test]
    fn json_shape() {
        let f = LaurentPoly::from_coeffs(Z, -1, &[3, 0, -2]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"ring":"Z","coeffs":{"-1":"3","1":"-2"}}"#);
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let g: LaurentPoly = serde_json::from_str(r#"{"ring":"Fp:3","coeffs":{"0":"4","2":"1/2"}}"#).unwrap();
        assert_eq!(g, LaurentPoly::from_coeffs(CoeffRing::PrimeField(3), 0, &[1, 0, 2]));
        assert!(serde_json::from_str::<LaurentPoly>(r#"{"ring":"Fp:4","coeffs":{}}"#).is_err());
    }

    #[test]
    fn canonical_forms() {
        let f = LaurentPoly::from_coeffs(Z, -2, &[3, 0, -1]);
        let (u, c) = f.canonical_split();
        assert_eq!(&u * &c, f);
        assert_eq!(c, zp(&[-3, 0, 1]));
        let g = LaurentPoly::from_coeffs(Q, 4, &[2, 4]);
        assert_eq!(g.canonical(), LaurentPoly::from_terms(Q, [(0, BigRational::new(1.into(), 2.into())), (1, BigRational::one())]).unwrap());
        assert!(LaurentPoly::monomial(Z, -1, 7).is_unit());
        assert!(!LaurentPoly::monomial(Z, 2, 0).is_unit());
        assert!(LaurentPoly::monomial(Q, 2, 0).is_unit());
    }

    #[test]
    fn fp_evaluation() {
        let f3 = CoeffRing::prime_field(3).unwrap();
        let f = quantum_integer(3, f3);
        assert_eq!(f.eval_mod_p(1).unwrap(), 0);
        assert_eq!(f.shift(-1).eval_mod_p(2).unwrap(), ((1 + 2 + 4) * 2) % 3);
    }
}
