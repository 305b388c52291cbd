//! Exact coefficient arithmetic.
//!
//! Three coefficient types form the tower used throughout the crate:
//! [`Rational`] (the ground field), [`HPoly`] (polynomials in the deformation
//! parameter ħ) and [`HRat`] (rational functions in ħ). All of them keep a
//! canonical form after every operation so that structural equality is
//! mathematical equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
}

fn parse_err(what: &'static str, input: &str, reason: impl Into<String>) -> ScalarError {
    ScalarError::Parse {
        what,
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Commutative ring of exact coefficients.
///
/// Arithmetic goes through the std operator traits with an owned left-hand
/// side, e.g. `a.clone() * &b`.
pub trait Scalar:
    Clone
    + Eq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn from_rational(r: &Rational) -> Self;
}

/// A [`Scalar`] in which every nonzero element is invertible.
pub trait FieldScalar: Scalar {
    fn inv(&self) -> Result<Self, ScalarError>;

    fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self.clone() * &rhs.inv()?)
    }
}

// ---------------------------------------------------------------------------
// Rational
// ---------------------------------------------------------------------------

/// Arbitrary-precision rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ScalarError> {
        let d: BigInt = denom.into();
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), d)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Rational::one();
        for _ in 0..e {
            acc = acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(parse_err("rational", s, "empty string"));
        }
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n = BigInt::from_str(n).map_err(|e| parse_err("rational", s, e.to_string()))?;
        let d = BigInt::from_str(d).map_err(|e| parse_err("rational", s, e.to_string()))?;
        Rational::new(n, d)
    }
}

macro_rules! forward_binops {
    ($t:ty, $inner:ident) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                self.$inner(&rhs, |a, b| a + b)
            }
        }
        impl<'a> Add<&'a $t> for $t {
            type Output = $t;
            fn add(self, rhs: &'a $t) -> $t {
                self.$inner(rhs, |a, b| a + b)
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                self.$inner(&rhs, |a, b| a - b)
            }
        }
        impl<'a> Sub<&'a $t> for $t {
            type Output = $t;
            fn sub(self, rhs: &'a $t) -> $t {
                self.$inner(rhs, |a, b| a - b)
            }
        }
        impl<'a> AddAssign<&'a $t> for $t {
            fn add_assign(&mut self, rhs: &'a $t) {
                let lhs = std::mem::take(self);
                *self = lhs + rhs;
            }
        }
        impl<'a> SubAssign<&'a $t> for $t {
            fn sub_assign(&mut self, rhs: &'a $t) {
                let lhs = std::mem::take(self);
                *self = lhs - rhs;
            }
        }
    };
}

impl Rational {
    fn zip_with(self, rhs: &Rational, f: impl Fn(BigRational, &BigRational) -> BigRational) -> Rational {
        Rational(f(self.0, &rhs.0))
    }
}

forward_binops!(Rational, zip_with);

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Rational> for Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        Rational(self.0 * &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn is_one(&self) -> bool {
        self.0.is_one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl FieldScalar for Rational {
    fn inv(&self) -> Result<Self, ScalarError> {
        if self.0.is_zero() {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(Rational(self.0.recip()))
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"p/q\", \"p\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v))
            }
        }
        d.deserialize_any(V)
    }
}

// ---------------------------------------------------------------------------
// HPoly
// ---------------------------------------------------------------------------

/// Polynomial in ħ with rational coefficients, lowest power first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct HPoly {
    coeffs: Vec<Rational>,
}

impl HPoly {
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = HPoly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: Rational) -> Self {
        HPoly::from_coeffs(vec![c])
    }

    /// `c·ħ^k`
    pub fn monomial(k: usize, c: Rational) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        HPoly::from_coeffs(v)
    }

    pub fn hbar() -> Self {
        HPoly::monomial(1, Rational::one())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// ħ-adic valuation; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Exact value at ħ = a (Horner).
    pub fn eval(&self, a: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * a + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> HPoly {
        if c.is_zero() {
            return HPoly::default();
        }
        HPoly {
            coeffs: self.coeffs.iter().map(|x| x.clone() * c).collect(),
        }
    }

    pub fn monic(&self) -> HPoly {
        match self.leading() {
            Some(lc) => self.scale(&lc.inv().expect("leading coefficient is nonzero")),
            None => HPoly::default(),
        }
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn div_rem(&self, d: &HPoly) -> Result<(HPoly, HPoly), ScalarError> {
        let dd = d.degree().ok_or(ScalarError::DivisionByZero)?;
        let lc_inv = d.coeffs[dd].inv()?;
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return Ok((HPoly::default(), HPoly::default()));
        };
        if nd < dd {
            return Ok((HPoly::default(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = rem[k + dd].clone() * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] -= &(c.clone() * dc);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((HPoly::from_coeffs(quot), HPoly::from_coeffs(rem)))
    }

    /// Exact quotient when `d` divides `self`.
    pub fn div_exact(&self, d: &HPoly) -> Option<HPoly> {
        let (q, r) = self.div_rem(d).ok()?;
        r.is_zero().then_some(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &HPoly) -> HPoly {
        match (self.degree(), other.degree()) {
            (None, _) => return other.monic(),
            (_, None) => return self.monic(),
            (Some(0), _) | (_, Some(0)) => return HPoly::one(),
            _ => {}
        }
        // primitive remainder sequence over Z
        let (mut a, mut b) = (primitive_int(self), primitive_int(other));
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = primitive(pseudo_rem(a, &b));
            a = b;
            b = r;
        }
        HPoly::from_coeffs(a.into_iter().map(|c| Rational::from(BigRational::from_integer(c))).collect()).monic()
    }

    /// `(g, s, t)` with `s·self + t·other = g`, `g` the monic gcd.
    pub fn ext_gcd(&self, other: &HPoly) -> (HPoly, HPoly, HPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (HPoly::one(), HPoly::zero());
        let (mut t0, mut t1) = (HPoly::zero(), HPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s = s0 - &(q.clone() * &s1);
            let t = t0 - &(q * &t1);
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s);
            (t0, t1) = (t1, t);
        }
        match r0.leading() {
            Some(lc) => {
                let k = lc.inv().expect("nonzero");
                (r0.scale(&k), s0.scale(&k), t0.scale(&k))
            }
            None => (r0, s0, t0),
        }
    }

    pub fn pow(&self, e: u32) -> HPoly {
        let mut acc = HPoly::one();
        for _ in 0..e {
            acc = acc * self;
        }
        acc
    }

    /// Rational roots, found by the rational root theorem. Polynomials whose
    /// integer-normalised extreme coefficients exceed `10^12` are skipped and
    /// yield only the root 0 if present.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let mut roots = Vec::new();
        let Some(v) = self.valuation() else {
            return roots;
        };
        if v > 0 {
            roots.push(Rational::zero());
        }
        let shifted: Vec<Rational> = self.coeffs[v..].to_vec();
        if shifted.len() <= 1 {
            return roots;
        }
        // clear denominators
        let lcm = shifted
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = shifted
            .iter()
            .map(|c| (c.clone() * &Rational::from_integer(lcm.clone())).numer().clone())
            .collect();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let limit = BigInt::from(1_000_000_000_000u64);
        if a0 > limit || an > limit {
            return roots;
        }
        let (a0, an) = (a0.to_u64().unwrap(), an.to_u64().unwrap());
        let p = HPoly::from_coeffs(shifted);
        let mut found = Vec::new();
        for num in divisors(a0) {
            for den in divisors(an) {
                for sign in [1i64, -1] {
                    let r = Rational::new(BigInt::from(num) * sign, BigInt::from(den)).unwrap();
                    if p.eval(&r).is_zero() && !found.contains(&r) {
                        found.push(r);
                    }
                }
            }
        }
        found.sort();
        roots.extend(found);
        roots
    }
}

fn divisors(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            if d != m / d {
                out.push(m / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Integer multiple of `p` with coprime coefficients, low degree first.
fn primitive_int(p: &HPoly) -> Vec<BigInt> {
    let l = p.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    primitive(p.coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect())
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in &mut v {
            *c /= &g;
        }
    }
    v
}

/// `lc(b)^k · a mod b` with nonzero `b`.
fn pseudo_rem(mut a: Vec<BigInt>, b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    while a.len() > db {
        let top = a.pop().expect("nonempty");
        let shift = a.len() - db;
        if top.is_zero() {
            continue;
        }
        for c in a.iter_mut() {
            *c *= lb;
        }
        for (i, bc) in b[..db].iter().enumerate() {
            a[shift + i] -= &top * bc;
        }
        while a.last().is_some_and(Zero::is_zero) && a.len() > db {
            a.pop();
        }
    }
    a
}

impl HPoly {
    fn zip_with(self, rhs: &HPoly, f: impl Fn(Rational, &Rational) -> Rational) -> HPoly {
        let mut coeffs = self.coeffs;
        if coeffs.len() < rhs.coeffs.len() {
            coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (i, c) in coeffs.iter_mut().enumerate() {
            let zero = Rational::zero();
            let r = rhs.coeffs.get(i).unwrap_or(&zero);
            let l = std::mem::take(c);
            *c = f(l, r);
        }
        HPoly::from_coeffs(coeffs)
    }
}

forward_binops!(HPoly, zip_with);

impl<'a> Mul<&'a HPoly> for HPoly {
    type Output = HPoly;
    fn mul(self, rhs: &'a HPoly) -> HPoly {
        if self.is_zero() || rhs.is_zero() {
            return HPoly::default();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a.clone() * b);
            }
        }
        HPoly::from_coeffs(out)
    }
}

impl Mul for HPoly {
    type Output = HPoly;
    fn mul(self, rhs: HPoly) -> HPoly {
        self * &rhs
    }
}

impl Neg for HPoly {
    type Output = HPoly;
    fn neg(self) -> HPoly {
        HPoly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Scalar for HPoly {
    fn zero() -> Self {
        HPoly::default()
    }
    fn one() -> Self {
        HPoly::constant(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }
    fn from_rational(r: &Rational) -> Self {
        HPoly::constant(r.clone())
    }
}

impl fmt::Display for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match k {
                0 => {}
                1 => f.write_str("h")?,
                _ => write!(f, "h^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HPoly({self})")
    }
}

impl FromStr for HPoly {
    type Err = ScalarError;

    /// Parses sums of terms `c`, `c*h^k`, `ch^k`, `h`, `-h^2`, … with `h`
    /// (or `ħ`) standing for the deformation parameter.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if c == 'ħ' { 'h' } else { c })
            .collect();
        if compact.is_empty() {
            return Err(parse_err("polynomial in h", s, "empty string"));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut acc = HPoly::zero();
        for t in terms {
            let (sign, body) = match t.as_bytes().first() {
                Some(b'-') => (-1i64, &t[1..]),
                Some(b'+') => (1, &t[1..]),
                _ => (1, t),
            };
            if body.is_empty() {
                return Err(parse_err("polynomial in h", s, "dangling sign"));
            }
            let (coeff_str, power) = match body.find('h') {
                None => (body, 0usize),
                Some(pos) => {
                    let rest = &body[pos + 1..];
                    let power = if rest.is_empty() {
                        1
                    } else if let Some(e) = rest.strip_prefix('^') {
                        e.parse::<usize>()
                            .map_err(|e| parse_err("polynomial in h", s, e.to_string()))?
                    } else {
                        return Err(parse_err("polynomial in h", s, format!("unexpected {rest:?}")));
                    };
                    (body[..pos].trim_end_matches('*'), power)
                }
            };
            let c = if coeff_str.is_empty() {
                Rational::one()
            } else {
                coeff_str.parse::<Rational>()?
            };
            acc += &HPoly::monomial(power, c * &Rational::from(sign));
        }
        Ok(acc)
    }
}

/// Serialized as a coefficient array, lowest power first, each entry a
/// rational string. On input, entries may also be integers or one-element
/// arrays.
impl Serialize for HPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffEntry {
    Plain(Rational),
    Wrapped([Rational; 1]),
}

impl<'de> Deserialize<'de> for HPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = HPoly;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of rational coefficients or a polynomial string in h")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<HPoly, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<HPoly, E> {
                Ok(HPoly::constant(Rational::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<HPoly, E> {
                Ok(HPoly::constant(Rational::from_integer(v)))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<HPoly, A::Error> {
                let mut coeffs = Vec::new();
                while let Some(e) = seq.next_element::<CoeffEntry>()? {
                    coeffs.push(match e {
                        CoeffEntry::Plain(r) => r,
                        CoeffEntry::Wrapped([r]) => r,
                    });
                }
                Ok(HPoly::from_coeffs(coeffs))
            }
        }
        d.deserialize_any(V)
    }
}

// ---------------------------------------------------------------------------
// HRat
// ---------------------------------------------------------------------------

/// Rational function in ħ: `num/den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HRat {
    num: HPoly,
    den: HPoly,
}

impl Default for HRat {
    fn default() -> Self {
        HRat {
            num: HPoly::zero(),
            den: HPoly::one(),
        }
    }
}

impl HRat {
    pub fn new(num: HPoly, den: HPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(HRat::reduced(num, den))
    }

    fn reduced(num: HPoly, den: HPoly) -> Self {
        if num.is_zero() {
            return HRat::default();
        }
        let lc = den.leading().expect("nonzero denominator").clone();
        if den.is_constant() {
            let inv = lc.inv().unwrap();
            return HRat {
                num: num.scale(&inv),
                den: HPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let lc_inv = d.leading().unwrap().inv().unwrap();
        if !lc_inv.is_one() {
            n = n.scale(&lc_inv);
            d = d.scale(&lc_inv);
        }
        HRat { num: n, den: d }
    }

    /// Assumes `num/den` is already in lowest terms.
    fn monic_den(num: HPoly, den: HPoly) -> Self {
        if num.is_zero() {
            return HRat::default();
        }
        let lc_inv = den.leading().expect("nonzero denominator").inv().expect("nonzero");
        if lc_inv.is_one() {
            HRat { num, den }
        } else {
            HRat {
                num: num.scale(&lc_inv),
                den: den.scale(&lc_inv),
            }
        }
    }

    pub fn from_hpoly(p: HPoly) -> Self {
        HRat {
            num: p,
            den: HPoly::one(),
        }
    }

    pub fn num(&self) -> &HPoly {
        &self.num
    }

    pub fn den(&self) -> &HPoly {
        &self.den
    }

    /// Value at ħ = a; `None` when the denominator vanishes there.
    pub fn eval(&self, a: &Rational) -> Option<Rational> {
        let d = self.den.eval(a);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(a) * &d.inv().unwrap())
        }
    }

    pub fn as_hpoly(&self) -> Option<&HPoly> {
        self.den.is_one().then_some(&self.num)
    }
}

impl Add<&HRat> for HRat {
    type Output = HRat;
    fn add(self, rhs: &HRat) -> HRat {
        if rhs.num.is_zero() {
            return self;
        }
        if self.num.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return HRat::from_hpoly(self.num + &rhs.num);
            }
            return HRat::reduced(self.num + &rhs.num, self.den);
        }
        // a/b + c/d with g = gcd(b, d): only g can share factors with the numerator
        let g = self.den.gcd(&rhs.den);
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = rhs.den.div_exact(&g).expect("gcd divides");
        let num = self.num * &d1 + &(rhs.num.clone() * &b1);
        let den = b1 * &rhs.den;
        if g.is_one() || num.is_zero() {
            return HRat::monic_den(num, den);
        }
        let h = num.gcd(&g);
        if h.is_one() {
            HRat::monic_den(num, den)
        } else {
            HRat::monic_den(num.div_exact(&h).expect("gcd divides"), den.div_exact(&h).expect("gcd divides"))
        }
    }
}

impl Sub<&HRat> for HRat {
    type Output = HRat;
    fn sub(self, rhs: &HRat) -> HRat {
        self + &(-rhs.clone())
    }
}

impl Mul<&HRat> for HRat {
    type Output = HRat;
    fn mul(self, rhs: &HRat) -> HRat {
        if self.num.is_zero() || rhs.num.is_zero() {
            return HRat::default();
        }
        // cross-cancel first to keep intermediate degrees small
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = rhs.den.div_exact(&g1).unwrap();
        let n2 = rhs.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let num = n1 * &n2;
        let den = d1 * &d2;
        let lc_inv = den.leading().unwrap().inv().unwrap();
        HRat {
            num: num.scale(&lc_inv),
            den: den.scale(&lc_inv),
        }
    }
}

impl Add for HRat {
    type Output = HRat;
    fn add(self, rhs: HRat) -> HRat {
        self + &rhs
    }
}

impl Sub for HRat {
    type Output = HRat;
    fn sub(self, rhs: HRat) -> HRat {
        self - &rhs
    }
}

impl Mul for HRat {
    type Output = HRat;
    fn mul(self, rhs: HRat) -> HRat {
        self * &rhs
    }
}

impl<'a> AddAssign<&'a HRat> for HRat {
    fn add_assign(&mut self, rhs: &'a HRat) {
        let lhs = std::mem::take(self);
        *self = lhs + rhs;
    }
}

impl<'a> SubAssign<&'a HRat> for HRat {
    fn sub_assign(&mut self, rhs: &'a HRat) {
        let lhs = std::mem::take(self);
        *self = lhs - rhs;
    }
}

impl Neg for HRat {
    type Output = HRat;
    fn neg(self) -> HRat {
        HRat {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Scalar for HRat {
    fn zero() -> Self {
        HRat::default()
    }
    fn one() -> Self {
        HRat::from_hpoly(HPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    fn from_rational(r: &Rational) -> Self {
        HRat::from_hpoly(HPoly::constant(r.clone()))
    }
}

impl FieldScalar for HRat {
    fn inv(&self) -> Result<Self, ScalarError> {
        if self.num.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let lc_inv = self.num.leading().unwrap().inv().unwrap();
        Ok(HRat {
            num: self.den.scale(&lc_inv),
            den: self.num.scale(&lc_inv),
        })
    }
}

impl fmt::Display for HRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &HPoly| {
            let s = p.to_string();
            if p.coeffs.iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for HRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HRat({self})")
    }
}

impl PartialOrd for HPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top; only used for deterministic
/// ordering of reports.
impl Ord for HPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}
