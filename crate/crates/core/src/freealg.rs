//! Words and noncommutative polynomials in the free algebra `T(V)[ħ]`.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;
use thiserror::Error;

use crate::scalar::{HPoly, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeAlgError {
    #[error("ambient generator counts differ ({left} vs {right})")]
    AmbientMismatch { left: usize, right: usize },
    #[error("generator index {index} outside 1..={n}")]
    BadIndex { index: usize, n: usize },
    #[error("degree of the zero polynomial is undefined")]
    Undefined,
}

/// A monomial of the free algebra: a sequence of 1-based generator indices.
///
/// Words are ordered degree-lexicographically (length first, then
/// letter by letter with `x1 < x2 < …`).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(SmallVec<[u8; 12]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn letter(i: usize) -> Self {
        Word(SmallVec::from_slice(&[i as u8]))
    }

    pub fn from_slice(letters: &[u8]) -> Self {
        Word(SmallVec::from_slice(letters))
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(letters: I) -> Self {
        Word(letters.into_iter().map(|i| i as u8).collect())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `left · self · right`
    pub fn wrap(&self, left: &[u8], right: &[u8]) -> Word {
        let mut v: SmallVec<[u8; 12]> = SmallVec::with_capacity(left.len() + self.len() + right.len());
        v.extend_from_slice(left);
        v.extend_from_slice(&self.0);
        v.extend_from_slice(right);
        Word(v)
    }

    pub fn push(&mut self, letter: u8) {
        self.0.push(letter);
    }

    pub fn max_letter(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0) as usize
    }

    /// Every letter lies in `1..=n`.
    pub fn fits(&self, n: usize) -> bool {
        self.0.iter().all(|&l| l >= 1 && (l as usize) <= n)
    }

    /// First position at which `pattern` occurs as a contiguous subword.
    pub fn find(&self, pattern: &[u8]) -> Option<usize> {
        if pattern.is_empty() {
            return Some(0);
        }
        self.0.windows(pattern.len()).position(|w| w == pattern)
    }
}

impl Borrow<[u8]> for Word {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

/// Finitely supported map `Word → S`: an element of the free algebra over `S`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NCPoly<S: Scalar = HPoly> {
    n: usize,
    terms: BTreeMap<Word, S>,
}

impl<S: Scalar> NCPoly<S> {
    pub fn zero(n: usize) -> Self {
        NCPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        NCPoly::monomial(n, Word::empty(), S::one())
    }

    /// The generator `x_i`; panics when `i` is out of range.
    pub fn var(n: usize, i: usize) -> Self {
        assert!((1..=n).contains(&i), "generator x{i} outside 1..={n}");
        NCPoly::monomial(n, Word::letter(i), S::one())
    }

    pub fn monomial(n: usize, w: Word, c: S) -> Self {
        debug_assert!(w.fits(n), "word {w} does not fit n = {n}");
        let mut p = NCPoly::zero(n);
        if !c.is_zero() {
            p.terms.insert(w, c);
        }
        p
    }

    /// Builds a polynomial from `(word, coefficient)` pairs, checking every
    /// letter against `n` and merging repeated words.
    pub fn from_terms<I: IntoIterator<Item = (Word, S)>>(n: usize, terms: I) -> Result<Self, FreeAlgError> {
        let mut p = NCPoly::zero(n);
        for (w, c) in terms {
            if let Some(&bad) = w.letters().iter().find(|&&l| l == 0 || l as usize > n) {
                return Err(FreeAlgError::BadIndex { index: bad as usize, n });
            }
            p.add_term(w, &c);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending deglex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &S)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Option<&S> {
        self.terms.get(w)
    }

    /// Largest word with its coefficient.
    pub fn leading(&self) -> Option<(&Word, &S)> {
        self.terms.last_key_value()
    }

    pub fn into_terms(self) -> BTreeMap<Word, S> {
        self.terms
    }

    pub fn add_term(&mut self, w: Word, c: &S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &NCPoly<S>, c: &S) {
        for (w, d) in &other.terms {
            self.add_term(w.clone(), &(c.clone() * d));
        }
    }

    /// `c · left · self · right` added into `acc`.
    pub fn add_wrapped_into(&self, acc: &mut NCPoly<S>, c: &S, left: &[u8], right: &[u8]) {
        for (w, d) in &self.terms {
            acc.add_term(w.wrap(left, right), &(c.clone() * d));
        }
    }

    pub fn scale(&self, c: &S) -> NCPoly<S> {
        if c.is_zero() {
            return NCPoly::zero(self.n);
        }
        NCPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(w, d)| (w.clone(), d.clone() * c))
                .filter(|(_, d)| !d.is_zero())
                .collect(),
        }
    }

    fn check_ambient(&self, other: &NCPoly<S>) -> Result<(), FreeAlgError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(FreeAlgError::AmbientMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn try_add(&self, other: &NCPoly<S>) -> Result<NCPoly<S>, FreeAlgError> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &S::one());
        Ok(out)
    }

    pub fn try_sub(&self, other: &NCPoly<S>) -> Result<NCPoly<S>, FreeAlgError> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &(-S::one()));
        Ok(out)
    }

    /// Product in the free algebra: bilinear extension of concatenation.
    pub fn try_mul(&self, other: &NCPoly<S>) -> Result<NCPoly<S>, FreeAlgError> {
        self.check_ambient(other)?;
        let mut out = NCPoly::zero(self.n);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), &(a.clone() * b));
            }
        }
        Ok(out)
    }

    /// `[p, q] = p·q − q·p`
    pub fn commutator(&self, other: &NCPoly<S>) -> Result<NCPoly<S>, FreeAlgError> {
        let mut pq = self.try_mul(other)?;
        let qp = other.try_mul(self)?;
        pq.add_scaled(&qp, &(-S::one()));
        Ok(pq)
    }

    /// Maximum word length over the support.
    pub fn deg_x(&self) -> Result<usize, FreeAlgError> {
        self.terms
            .keys()
            .map(Word::len)
            .max()
            .ok_or(FreeAlgError::Undefined)
    }

    /// Part of x-degree exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> NCPoly<S> {
        NCPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> NCPoly<T> {
        NCPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter_map(|(w, c)| {
                    let d = f(c);
                    (!d.is_zero()).then(|| (w.clone(), d))
                })
                .collect(),
        }
    }

    /// Same polynomial viewed with a larger ambient generator count.
    pub fn with_ambient(&self, n: usize) -> Result<NCPoly<S>, FreeAlgError> {
        if let Some((w, _)) = self.terms.iter().find(|(w, _)| !w.fits(n)) {
            return Err(FreeAlgError::BadIndex {
                index: w.max_letter(),
                n,
            });
        }
        Ok(NCPoly {
            n,
            terms: self.terms.clone(),
        })
    }
}

impl NCPoly<HPoly> {
    /// Coefficient of `ħ^k`, a polynomial with rational coefficients.
    pub fn hbar_coefficient(&self, k: usize) -> NCPoly<Rational> {
        self.map_coeffs(|c| c.coeff(k))
    }

    /// Largest power of ħ present in any coefficient.
    pub fn hbar_degree(&self) -> Option<usize> {
        self.terms.values().filter_map(HPoly::degree).max()
    }

    /// Smallest power of ħ present in any coefficient.
    pub fn hbar_valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(HPoly::valuation).min()
    }

    /// Evaluate every coefficient at ħ = a.
    pub fn specialize(&self, a: &Rational) -> NCPoly<Rational> {
        self.map_coeffs(|c| c.eval(a))
    }

    /// Inverse of [`hbar_coefficient`](Self::hbar_coefficient): `Σ_k ħ^k·parts[k]`.
    pub fn from_hbar_parts(n: usize, parts: &[NCPoly<Rational>]) -> NCPoly<HPoly> {
        let mut out = NCPoly::zero(n);
        for (k, part) in parts.iter().enumerate() {
            for (w, c) in part.terms() {
                out.add_term(w.clone(), &HPoly::monomial(k, c.clone()));
            }
        }
        out
    }
}

impl NCPoly<Rational> {
    /// Embed into `ℚ[ħ]` coefficients.
    pub fn lift<T: Scalar>(&self) -> NCPoly<T> {
        self.map_coeffs(T::from_rational)
    }
}

impl<S: Scalar> Add for &NCPoly<S> {
    type Output = NCPoly<S>;
    /// Panics on mismatched ambient counts; see [`NCPoly::try_add`].
    fn add(self, rhs: &NCPoly<S>) -> NCPoly<S> {
        self.try_add(rhs).expect("ambient mismatch in NCPoly addition")
    }
}

impl<S: Scalar> Sub for &NCPoly<S> {
    type Output = NCPoly<S>;
    fn sub(self, rhs: &NCPoly<S>) -> NCPoly<S> {
        self.try_sub(rhs).expect("ambient mismatch in NCPoly subtraction")
    }
}

impl<S: Scalar> Mul for &NCPoly<S> {
    type Output = NCPoly<S>;
    fn mul(self, rhs: &NCPoly<S>) -> NCPoly<S> {
        self.try_mul(rhs).expect("ambient mismatch in NCPoly product")
    }
}

impl<S: Scalar> Neg for &NCPoly<S> {
    type Output = NCPoly<S>;
    fn neg(self) -> NCPoly<S> {
        self.scale(&(-S::one()))
    }
}

impl<S: Scalar> fmt::Display for NCPoly<S> {
    /// Highest word first, e.g. `(-1 + h)*x2*x1 + x1*x2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().rev().enumerate() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
                _ => (false, cs),
            };
            if k > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let mag = if mag.contains(' ') { format!("({mag})") } else { mag };
            match (w.is_empty(), mag == "1") {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{w}")?,
                (false, false) => write!(f, "{mag}*{w}")?,
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for NCPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NCPoly[n={}]({self})", self.n)
    }
}
