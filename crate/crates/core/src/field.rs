//! Exact coefficient fields: the rationals and prime fields `GF(p)`.
//!
//! Every algorithm in this crate is generic over [`Field`]. A field is a small
//! runtime value (the prime modulus lives in it), and elements are plain data
//! that carry no reference back to their field. Code that receives a
//! [`FieldTag`] at runtime (a parsed file, a CLI flag) uses
//! [`FieldTag::dispatch`] to select the monomorphized implementation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prime used when no field is requested explicitly.
pub const DEFAULT_PRIME: u32 = 32003;

/// Which field a matrix or subspace lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldTag {
    Rational,
    Prime(u32),
}

impl FieldTag {
    pub fn default_prime() -> Self {
        FieldTag::Prime(DEFAULT_PRIME)
    }

    /// Runs `visitor` with the concrete field named by this tag.
    pub fn dispatch<V: FieldVisitor>(self, visitor: V) -> Result<V::Output> {
        match self {
            FieldTag::Rational => Ok(visitor.visit(Rationals)),
            FieldTag::Prime(p) => Ok(visitor.visit(PrimeField::new(p)?)),
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rational => write!(f, "QQ"),
            FieldTag::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

impl FromStr for FieldTag {
    type Err = Error;

    /// Accepts `QQ`, `GF(p)` and the command-line spelling `GFp:p`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("qq") {
            return Ok(FieldTag::Rational);
        }
        let digits = s
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("GFp:"))
            .ok_or_else(|| Error::Parse(format!("unknown field `{s}`")))?;
        let p: u32 = digits
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad prime in field `{s}`")))?;
        PrimeField::new(p)?;
        Ok(FieldTag::Prime(p))
    }
}

impl Serialize for FieldTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A field element detached from any particular [`Field`] implementation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldScalar {
    Rational(BigRational),
    Prime { value: u32, modulus: u32 },
}

impl FieldScalar {
    pub fn tag(&self) -> FieldTag {
        match self {
            FieldScalar::Rational(_) => FieldTag::Rational,
            FieldScalar::Prime { modulus, .. } => FieldTag::Prime(*modulus),
        }
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldScalar::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldScalar::Prime { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Parses `a` or `a/b` with arbitrary-size integers.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
        Some((a, b)) => {
            let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if b.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(a, b))
        }
    }
}

/// Builds a concrete field from a tag; see [`FieldTag::dispatch`].
pub trait FieldVisitor {
    type Output;
    fn visit<F: Field>(self, field: F) -> Self::Output;
}

/// Exact field arithmetic.
#[allow(clippy::wrong_self_convention)]
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn tag(&self) -> FieldTag;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem>;
    fn to_scalar(&self, a: &Self::Elem) -> FieldScalar;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn parse_elem(&self, s: &str) -> Result<Self::Elem> {
        self.from_rational(&parse_rational(s)?)
    }

    /// `a - c * b`, the elimination update.
    fn sub_mul(&self, a: &Self::Elem, c: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(a, &self.mul(c, b))
    }

    /// Rank of a dense row-major matrix. Consumes the buffer.
    fn dense_rank(&self, data: Vec<Self::Elem>, rows: usize, cols: usize) -> usize {
        crate::exactalg::dense::generic_rank(self, data, rows, cols)
    }
}

/// The rational numbers with arbitrary-precision numerators and denominators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn tag(&self) -> FieldTag {
        FieldTag::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }
    fn to_scalar(&self, a: &BigRational) -> FieldScalar {
        FieldScalar::Rational(a.clone())
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.random_range(-9..=9))
    }
}

/// Residues modulo an odd prime `p < 2^31`, stored reduced in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !(3..1 << 31).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce_u64(&self, v: u64) -> u32 {
        (v % self.p as u64) as u32
    }

    fn pow(&self, base: u32, mut e: u32) -> u32 {
        let mut acc = 1u64;
        let p = self.p as u64;
        let mut b = base as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc as u32
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u32;

    fn tag(&self) -> FieldTag {
        FieldTag::Prime(self.p)
    }
    #[inline]
    fn zero(&self) -> u32 {
        0
    }
    #[inline]
    fn one(&self) -> u32 {
        1
    }
    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        if s >= self.p as u64 {
            (s - self.p as u64) as u32
        } else {
            s as u32
        }
    }
    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (*a as u64 + self.p as u64 - *b as u64) as u32
        }
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.reduce_u64(*a as u64 * *b as u64)
    }
    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> u32 {
        assert!(*a != 0, "inverse of zero");
        self.pow(*a, self.p - 2)
    }
    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
    fn from_rational(&self, q: &BigRational) -> Result<u32> {
        let p = BigInt::from(self.p);
        let reduce = |x: &BigInt| -> u32 { x.mod_floor(&p).to_u32().expect("residue fits u32") };
        let den = reduce(q.denom());
        if den == 0 {
            return Err(Error::Parse(format!(
                "denominator of {q} vanishes modulo {}",
                self.p
            )));
        }
        let num = if q.numer().is_negative() {
            self.neg(&reduce(&-q.numer()))
        } else {
            reduce(q.numer())
        };
        Ok(self.mul(&num, &self.inv(&den)))
    }
    fn to_scalar(&self, a: &u32) -> FieldScalar {
        FieldScalar::Prime {
            value: *a,
            modulus: self.p,
        }
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.random_range(0..self.p)
    }
    #[inline]
    fn sub_mul(&self, a: &u32, c: &u32, b: &u32) -> u32 {
        let p = self.p as u64;
        ((*a as u64 + p * p - *c as u64 * *b as u64) % p) as u32
    }
    fn dense_rank(&self, data: Vec<u32>, rows: usize, cols: usize) -> usize {
        crate::exactalg::dense::prime_rank(self, data, rows, cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_field_tags() {
        assert_eq!("QQ".parse::<FieldTag>().unwrap(), FieldTag::Rational);
        assert_eq!("GF(32003)".parse::<FieldTag>().unwrap(), FieldTag::Prime(32003));
        assert_eq!("GFp:7".parse::<FieldTag>().unwrap(), FieldTag::Prime(7));
        assert!("GF(32004)".parse::<FieldTag>().is_err());
        assert!("GFp:2".parse::<FieldTag>().is_err());
        assert!("RR".parse::<FieldTag>().is_err());
    }

    #[test]
    fn prime_field_arithmetic_stays_reduced() {
        let f = PrimeField::new(32003).unwrap();
        assert_eq!(f.from_i64(-1), 32002);
        assert_eq!(f.add(&32002, &5), 4);
        assert_eq!(f.sub(&3, &5), 32001);
        for a in [1u32, 2, 17, 32002] {
            assert_eq!(f.mul(&a, &f.inv(&a)), 1);
        }
        assert_eq!(f.sub_mul(&0, &32002, &32002), 32002);
        let half = f.parse_elem("1/2").unwrap();
        assert_eq!(f.mul(&half, &2), 1);
        assert_eq!(f.parse_elem("-3/4").unwrap(), f.neg(&f.mul(&3, &f.inv(&4))));
        assert!(PrimeField::new(7).unwrap().parse_elem("1/14").is_err());
    }

    #[test]
    fn rational_display_round_trips() {
        let q = parse_rational("-6/4").unwrap();
        let s = Rationals.to_scalar(&q).to_string();
        assert_eq!(s, "-3/2");
        assert_eq!(parse_rational(&s).unwrap(), q);
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
