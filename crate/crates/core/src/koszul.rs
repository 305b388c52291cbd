//! Degree 0, −1, −2 part of the Koszul complex: the free graded algebra on
//! `x_i` (degree 0), `ξ_ij` (degree −1) and `ξ_ijk` (degree −2).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::freealg::{NCPoly, Word};
use crate::presentation::{LieData, Presentation, QuadData};
use crate::scalar::{HPoly, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KoszulError {
    #[error("element mixes cohomological degrees {0} and {1}")]
    Inhomogeneous(i32, i32),
    #[error("the differential is only defined on degrees -1 and -2, got {0}")]
    UnsupportedDegree(i32),
    #[error("index {index} outside 1..={n}")]
    BadIndex { index: usize, n: usize },
    #[error("ambient mismatch: {left} vs {right} generators")]
    AmbientMismatch { left: usize, right: usize },
    #[error("d2 value for ({0}, {1}, {2}) must have degree -1 with one xi2 per word")]
    BadD2Value(usize, usize, usize),
    #[error("a word of degree -2 must hold one xi3 or two xi2 symbols")]
    BadWord,
}

/// Generators of the truncated complex. Stored indices are strictly increasing.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KoszulSymbol {
    X(u8),
    Xi2(u8, u8),
    Xi3(u8, u8, u8),
}

impl KoszulSymbol {
    pub fn x(i: usize) -> Self {
        KoszulSymbol::X(i as u8)
    }

    /// `ξ_ij` as `(sign, symbol)`; `None` when `i == j`.
    pub fn xi2(i: usize, j: usize) -> Option<(i8, Self)> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Some((1, KoszulSymbol::Xi2(i as u8, j as u8))),
            std::cmp::Ordering::Greater => Some((-1, KoszulSymbol::Xi2(j as u8, i as u8))),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// `ξ_ijk` as `(sign of the sorting permutation, symbol)`; `None` on a
    /// repeated index.
    pub fn xi3(i: usize, j: usize, k: usize) -> Option<(i8, Self)> {
        let mut v = [i, j, k];
        let mut sign = 1i8;
        for a in 0..3 {
            for b in 0..2 - a {
                if v[b] > v[b + 1] {
                    v.swap(b, b + 1);
                    sign = -sign;
                }
            }
        }
        if v[0] == v[1] || v[1] == v[2] {
            return None;
        }
        Some((sign, KoszulSymbol::Xi3(v[0] as u8, v[1] as u8, v[2] as u8)))
    }

    pub fn degree(&self) -> i32 {
        match self {
            KoszulSymbol::X(_) => 0,
            KoszulSymbol::Xi2(..) => -1,
            KoszulSymbol::Xi3(..) => -2,
        }
    }

    fn max_index(&self) -> usize {
        match *self {
            KoszulSymbol::X(i) => i as usize,
            KoszulSymbol::Xi2(_, j) => j as usize,
            KoszulSymbol::Xi3(_, _, k) => k as usize,
        }
    }

    fn min_index(&self) -> usize {
        match *self {
            KoszulSymbol::X(i) | KoszulSymbol::Xi2(i, _) | KoszulSymbol::Xi3(i, _, _) => i as usize,
        }
    }
}

impl fmt::Display for KoszulSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KoszulSymbol::X(i) => write!(f, "x{i}"),
            KoszulSymbol::Xi2(i, j) => write!(f, "xi[{i},{j}]"),
            KoszulSymbol::Xi3(i, j, k) => write!(f, "xi[{i},{j},{k}]"),
        }
    }
}

impl fmt::Debug for KoszulSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub type KoszulWord = Vec<KoszulSymbol>;

fn word_degree(w: &[KoszulSymbol]) -> i32 {
    w.iter().map(KoszulSymbol::degree).sum()
}

/// Finite combination of Koszul words with `ℚ[ħ]` coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct KoszulPoly {
    n: usize,
    terms: BTreeMap<KoszulWord, HPoly>,
}

impl KoszulPoly {
    pub fn zero(n: usize) -> Self {
        KoszulPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Raw constructor; homogeneity is checked where it matters.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, KoszulError>
    where
        I: IntoIterator<Item = (KoszulWord, HPoly)>,
    {
        let mut p = KoszulPoly::zero(n);
        for (w, c) in terms {
            for s in &w {
                if s.min_index() == 0 || s.max_index() > n {
                    let index = if s.min_index() == 0 { 0 } else { s.max_index() };
                    return Err(KoszulError::BadIndex { index, n });
                }
            }
            p.add_term(w, &c);
        }
        Ok(p)
    }

    pub fn symbol(n: usize, s: KoszulSymbol) -> Self {
        KoszulPoly::from_terms(n, [(vec![s], HPoly::one())]).expect("symbol in range")
    }

    pub fn x(n: usize, i: usize) -> Self {
        KoszulPoly::symbol(n, KoszulSymbol::x(i))
    }

    /// Signed `ξ_ij`; zero for `i == j`.
    pub fn xi2(n: usize, i: usize, j: usize) -> Self {
        match KoszulSymbol::xi2(i, j) {
            Some((s, sym)) => KoszulPoly::symbol(n, sym).scale(&HPoly::constant(Rational::from(s as i64))),
            None => KoszulPoly::zero(n),
        }
    }

    /// Signed `ξ_ijk`; zero on repeated indices.
    pub fn xi3(n: usize, i: usize, j: usize, k: usize) -> Self {
        match KoszulSymbol::xi3(i, j, k) {
            Some((s, sym)) => KoszulPoly::symbol(n, sym).scale(&HPoly::constant(Rational::from(s as i64))),
            None => KoszulPoly::zero(n),
        }
    }

    /// Embeds a free-algebra element as a degree-0 Koszul element.
    pub fn from_ncpoly(p: &NCPoly<HPoly>) -> Self {
        let mut out = KoszulPoly::zero(p.n());
        for (w, c) in p.terms() {
            out.add_term(w.letters().iter().map(|&l| KoszulSymbol::X(l)).collect(), c);
        }
        out
    }

    /// Inverse of [`from_ncpoly`](Self::from_ncpoly) on degree-0 elements.
    pub fn to_ncpoly(&self) -> Option<NCPoly<HPoly>> {
        let mut out = NCPoly::zero(self.n);
        for (w, c) in &self.terms {
            let mut letters = Vec::with_capacity(w.len());
            for s in w {
                match s {
                    KoszulSymbol::X(i) => letters.push(*i),
                    _ => return None,
                }
            }
            out.add_term(Word::from_slice(&letters), c);
        }
        Some(out)
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

    pub fn terms(&self) -> impl Iterator<Item = (&KoszulWord, &HPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &[KoszulSymbol]) -> Option<&HPoly> {
        self.terms.get(w)
    }

    pub fn add_term(&mut self, w: KoszulWord, c: &HPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &HPoly) -> KoszulPoly {
        let mut out = KoszulPoly::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (w, v) in &self.terms {
            out.add_term(w.clone(), &(v.clone() * c));
        }
        out
    }

    /// Common cohomological degree; `Ok(None)` for zero.
    pub fn degree(&self) -> Result<Option<i32>, KoszulError> {
        let mut it = self.terms.keys().map(|w| word_degree(w));
        let Some(first) = it.next() else { return Ok(None) };
        for d in it {
            if d != first {
                return Err(KoszulError::Inhomogeneous(first, d));
            }
        }
        Ok(Some(first))
    }

    pub fn try_add(&self, other: &KoszulPoly) -> Result<KoszulPoly, KoszulError> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out.degree()?;
        Ok(out)
    }

    pub fn try_sub(&self, other: &KoszulPoly) -> Result<KoszulPoly, KoszulError> {
        self.try_add(&other.scale(&-HPoly::one()))
    }

    pub fn try_mul(&self, other: &KoszulPoly) -> Result<KoszulPoly, KoszulError> {
        self.check_ambient(other)?;
        let mut out = KoszulPoly::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, &(ca.clone() * cb));
            }
        }
        Ok(out)
    }

    /// `[a, b] = ab − ba` (no Koszul sign: used with one even factor).
    pub fn commutator(&self, other: &KoszulPoly) -> Result<KoszulPoly, KoszulError> {
        let ab = self.try_mul(other)?;
        let ba = other.try_mul(self)?;
        let mut out = ab;
        for (w, c) in ba.terms {
            out.add_term(w, &-c);
        }
        Ok(out)
    }

    fn check_ambient(&self, other: &KoszulPoly) -> Result<(), KoszulError> {
        if self.n != other.n {
            return Err(KoszulError::AmbientMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl fmt::Display for KoszulPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let word: Vec<String> = w.iter().map(|s| s.to_string()).collect();
            let word = if word.is_empty() { "1".to_string() } else { word.join("*") };
            if c.is_one() {
                f.write_str(&word)?;
            } else {
                write!(f, "({c})*{word}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for KoszulPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KoszulPoly[n={}]({self})", self.n)
    }
}

/// `d1` on the `ξ_ij` and `d2` on the `ξ_ijk`, keyed by sorted indices.
/// Missing `d2` entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Differential {
    n: usize,
    d1: BTreeMap<(usize, usize), NCPoly<HPoly>>,
    d2: BTreeMap<(usize, usize, usize), KoszulPoly>,
}

impl Differential {
    /// Checks that each `d2` value has degree −1 with one `ξ_ij` per word.
    pub fn new(
        n: usize,
        d1: BTreeMap<(usize, usize), NCPoly<HPoly>>,
        d2: BTreeMap<(usize, usize, usize), KoszulPoly>,
    ) -> Result<Self, KoszulError> {
        for (&(i, j, k), v) in &d2 {
            if !(1 <= i && i < j && j < k && k <= n) {
                return Err(KoszulError::BadIndex { index: k.max(i), n });
            }
            if v.n() != n {
                return Err(KoszulError::AmbientMismatch { left: n, right: v.n() });
            }
            let ok = v.terms().all(|(w, _)| {
                w.iter().filter(|s| matches!(s, KoszulSymbol::Xi2(..))).count() == 1
                    && w.iter().all(|s| !matches!(s, KoszulSymbol::Xi3(..)))
            });
            if !ok {
                return Err(KoszulError::BadD2Value(i, j, k));
            }
        }
        for (&(i, j), v) in &d1 {
            if !(1 <= i && i < j && j <= n) {
                return Err(KoszulError::BadIndex { index: j.max(i), n });
            }
            if v.n() != n {
                return Err(KoszulError::AmbientMismatch { left: n, right: v.n() });
            }
        }
        Ok(Differential { n, d1, d2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `d1(ξ_ij)` with the signed convention.
    pub fn d1(&self, i: usize, j: usize) -> NCPoly<HPoly> {
        match KoszulSymbol::xi2(i, j) {
            Some((s, KoszulSymbol::Xi2(a, b))) => {
                let v = self
                    .d1
                    .get(&(a as usize, b as usize))
                    .cloned()
                    .unwrap_or_else(|| NCPoly::zero(self.n));
                if s < 0 {
                    -&v
                } else {
                    v
                }
            }
            _ => NCPoly::zero(self.n),
        }
    }

    /// `d2(ξ_ijk)` with the signed convention.
    pub fn d2(&self, i: usize, j: usize, k: usize) -> KoszulPoly {
        match KoszulSymbol::xi3(i, j, k) {
            Some((s, KoszulSymbol::Xi3(a, b, c))) => {
                let v = self
                    .d2
                    .get(&(a as usize, b as usize, c as usize))
                    .cloned()
                    .unwrap_or_else(|| KoszulPoly::zero(self.n));
                v.scale(&HPoly::constant(Rational::from(s as i64)))
            }
            _ => KoszulPoly::zero(self.n),
        }
    }

    pub fn d2_map(&self) -> &BTreeMap<(usize, usize, usize), KoszulPoly> {
        &self.d2
    }
}

/// `d1(ξ_ij) = x_i x_j − x_j x_i − φ_ij` for `i < j`.
pub fn d1_from_presentation(p: &Presentation) -> BTreeMap<(usize, usize), NCPoly<HPoly>> {
    p.relations().into_iter().collect()
}

pub fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (1..=n).flat_map(move |i| (i + 1..=n).flat_map(move |j| (j + 1..=n).map(move |k| (i, j, k))))
}

fn cyclic(i: usize, j: usize, k: usize) -> [(usize, usize, usize); 3] {
    [(i, j, k), (j, k, i), (k, i, j)]
}

fn default_value(n: usize, i: usize, j: usize, k: usize) -> KoszulPoly {
    let mut out = KoszulPoly::zero(n);
    for (a, b, c) in cyclic(i, j, k) {
        let t = KoszulPoly::x(n, a).commutator(&KoszulPoly::xi2(n, b, c)).expect("same ambient");
        out = out.try_add(&t).expect("homogeneous");
    }
    out
}

/// `d(ξ_ijk) = [x_i, ξ_jk] + [x_j, ξ_ki] + [x_k, ξ_ij]`.
pub fn d2_default(n: usize) -> BTreeMap<(usize, usize, usize), KoszulPoly> {
    triples(n).map(|(i, j, k)| ((i, j, k), default_value(n, i, j, k))).collect()
}

/// Default value minus `ħ Σ_p Cycl c_ij^p ξ_pk`.
pub fn d2_lie(d: &LieData) -> BTreeMap<(usize, usize, usize), KoszulPoly> {
    let n = d.n();
    let mhbar = HPoly::monomial(1, -Rational::one());
    triples(n)
        .map(|(i, j, k)| {
            let mut v = default_value(n, i, j, k);
            for (a, b, c) in cyclic(i, j, k) {
                for p in 1..=n {
                    let cab = d.c(a, b, p);
                    if cab.is_zero() {
                        continue;
                    }
                    let t = KoszulPoly::xi2(n, p, c).scale(&mhbar.scale(&cab));
                    v = v.try_add(&t).expect("homogeneous");
                }
            }
            ((i, j, k), v)
        })
        .collect()
}

/// Default value plus `ħ Cycl Σ_{a,b} α_jk^{ab} (ξ_ia x_b + x_a ξ_ib)`.
pub fn d2_quadratic(d: &QuadData) -> BTreeMap<(usize, usize, usize), KoszulPoly> {
    let n = d.n();
    let hbar = HPoly::hbar();
    triples(n)
        .map(|(i, j, k)| {
            let mut v = default_value(n, i, j, k);
            for (s, t, u) in cyclic(i, j, k) {
                for a in 1..=n {
                    for b in 1..=n {
                        let al = d.alpha(t, u, a, b);
                        if al.is_zero() {
                            continue;
                        }
                        let c = hbar.scale(&al);
                        let left = KoszulPoly::xi2(n, s, a).try_mul(&KoszulPoly::x(n, b)).expect("same ambient");
                        let right = KoszulPoly::x(n, a).try_mul(&KoszulPoly::xi2(n, s, b)).expect("same ambient");
                        v = v.try_add(&left.scale(&c)).expect("homogeneous");
                        v = v.try_add(&right.scale(&c)).expect("homogeneous");
                    }
                }
            }
            ((i, j, k), v)
        })
        .collect()
}

/// Result of applying the differential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DImage {
    /// Image of a degree −1 element.
    Even(NCPoly<HPoly>),
    /// Image of a degree −2 element.
    Odd(KoszulPoly),
    Zero,
}

impl DImage {
    pub fn is_zero(&self) -> bool {
        match self {
            DImage::Even(p) => p.is_zero(),
            DImage::Odd(p) => p.is_zero(),
            DImage::Zero => true,
        }
    }

    /// Degree-0 images as an `NCPoly`; zero maps to zero.
    pub fn into_ncpoly(self, n: usize) -> Option<NCPoly<HPoly>> {
        match self {
            DImage::Even(p) => Some(p),
            DImage::Zero => Some(NCPoly::zero(n)),
            DImage::Odd(_) => None,
        }
    }

    pub fn into_koszul(self, n: usize) -> KoszulPoly {
        match self {
            DImage::Even(p) => KoszulPoly::from_ncpoly(&p),
            DImage::Odd(p) => p,
            DImage::Zero => KoszulPoly::zero(n),
        }
    }
}

fn x_letters(w: &[KoszulSymbol]) -> Option<Vec<u8>> {
    w.iter()
        .map(|s| match s {
            KoszulSymbol::X(i) => Some(*i),
            _ => None,
        })
        .collect()
}

fn lift_word(letters: &Word) -> KoszulWord {
    letters.letters().iter().map(|&l| KoszulSymbol::X(l)).collect()
}

/// Applies `d` by the graded Leibniz rule. Crossing a `ξ_ij` costs a sign;
/// `x_i` and `ξ_ijk` cross freely.
pub fn apply_d(diff: &Differential, p: &KoszulPoly) -> Result<DImage, KoszulError> {
    if p.n() != diff.n {
        return Err(KoszulError::AmbientMismatch { left: diff.n, right: p.n() });
    }
    match p.degree()? {
        None => Ok(DImage::Zero),
        Some(-1) => {
            let mut out = NCPoly::zero(diff.n);
            for (w, c) in p.terms() {
                let pos = w.iter().position(|s| s.degree() == -1).ok_or(KoszulError::BadWord)?;
                let (KoszulSymbol::Xi2(i, j), Some(left), Some(right)) =
                    (w[pos], x_letters(&w[..pos]), x_letters(&w[pos + 1..]))
                else {
                    return Err(KoszulError::BadWord);
                };
                diff.d1(i as usize, j as usize).add_wrapped_into(&mut out, c, &left, &right);
            }
            Ok(DImage::Even(out))
        }
        Some(-2) => {
            let mut out = KoszulPoly::zero(diff.n);
            for (w, c) in p.terms() {
                let odd: Vec<usize> = w
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.degree() != 0)
                    .map(|(k, _)| k)
                    .collect();
                match odd.as_slice() {
                    [pos] => {
                        let KoszulSymbol::Xi3(i, j, k) = w[*pos] else {
                            return Err(KoszulError::BadWord);
                        };
                        let img = diff.d2(i as usize, j as usize, k as usize);
                        for (iw, ic) in img.terms() {
                            let mut nw = w[..*pos].to_vec();
                            nw.extend_from_slice(iw);
                            nw.extend_from_slice(&w[pos + 1..]);
                            out.add_term(nw, &(ic.clone() * c));
                        }
                    }
                    [p1, p2] => {
                        for (pos, sign) in [(*p1, 1i64), (*p2, -1i64)] {
                            let KoszulSymbol::Xi2(i, j) = w[pos] else {
                                return Err(KoszulError::BadWord);
                            };
                            let img = diff.d1(i as usize, j as usize);
                            let coeff = c.scale(&Rational::from(sign));
                            for (iw, ic) in img.terms() {
                                let mut nw = w[..pos].to_vec();
                                nw.extend(lift_word(iw));
                                nw.extend_from_slice(&w[pos + 1..]);
                                out.add_term(nw, &(ic.clone() * &coeff));
                            }
                        }
                    }
                    _ => return Err(KoszulError::BadWord),
                }
            }
            Ok(DImage::Odd(out))
        }
        Some(d) => Err(KoszulError::UnsupportedDegree(d)),
    }
}

/// `d1 ∘ d2 (ξ_ijk)` as an element of the free algebra.
pub fn composite(diff: &Differential, i: usize, j: usize, k: usize) -> NCPoly<HPoly> {
    let v = diff.d2(i, j, k);
    apply_d(diff, &v)
        .expect("d2 values are homogeneous of degree -1")
        .into_ncpoly(diff.n)
        .expect("degree -1 maps to degree 0")
}

/// Unmerged expansion of `d1` on a degree −1 element: one entry per
/// (term of `p`, term of the `d1` image) pair, before like terms combine.
pub fn expand_d(diff: &Differential, p: &KoszulPoly) -> Result<Vec<(Word, HPoly)>, KoszulError> {
    match p.degree()? {
        None => return Ok(Vec::new()),
        Some(-1) => {}
        Some(d) => return Err(KoszulError::UnsupportedDegree(d)),
    }
    let mut out = Vec::new();
    for (w, c) in p.terms() {
        let pos = w.iter().position(|s| s.degree() == -1).ok_or(KoszulError::BadWord)?;
        let (KoszulSymbol::Xi2(i, j), Some(left), Some(right)) =
            (w[pos], x_letters(&w[..pos]), x_letters(&w[pos + 1..]))
        else {
            return Err(KoszulError::BadWord);
        };
        for (iw, ic) in diff.d1(i as usize, j as usize).terms() {
            out.push((iw.wrap(&left, &right), ic.clone() * c));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::Potential;

    fn hp(s: &str) -> HPoly {
        s.parse().unwrap()
    }

    fn x(n: usize, i: usize) -> NCPoly<HPoly> {
        NCPoly::var(n, i)
    }

    fn kx(n: usize, i: usize) -> KoszulPoly {
        KoszulPoly::x(n, i)
    }

    fn kxi(n: usize, i: usize, j: usize) -> KoszulPoly {
        KoszulPoly::xi2(n, i, j)
    }

    fn mul(a: &KoszulPoly, b: &KoszulPoly) -> KoszulPoly {
        a.try_mul(b).unwrap()
    }

    fn add(a: &KoszulPoly, b: &KoszulPoly) -> KoszulPoly {
        a.try_add(b).unwrap()
    }

    fn poly_diff(p: &Presentation, d2: BTreeMap<(usize, usize, usize), KoszulPoly>) -> Differential {
        Differential::new(p.n(), d1_from_presentation(p), d2).unwrap()
    }

    #[test]
    fn symbol_signs() {
        assert_eq!(KoszulSymbol::xi2(2, 1), Some((-1, KoszulSymbol::Xi2(1, 2))));
        assert_eq!(KoszulSymbol::xi2(3, 3), None);
        assert_eq!(KoszulSymbol::xi3(2, 1, 3), Some((-1, KoszulSymbol::Xi3(1, 2, 3))));
        assert_eq!(KoszulSymbol::xi3(3, 1, 2), Some((1, KoszulSymbol::Xi3(1, 2, 3))));
        assert_eq!(KoszulSymbol::xi3(1, 3, 1), None);
        assert_eq!(kxi(3, 2, 1), kxi(3, 1, 2).scale(&hp("-1")));
        let perms = [(1, 2, 3, 1), (2, 3, 1, 1), (3, 1, 2, 1), (2, 1, 3, -1), (1, 3, 2, -1), (3, 2, 1, -1)];
        for (i, j, k, s) in perms {
            assert_eq!(
                KoszulPoly::xi3(3, i, j, k),
                KoszulPoly::xi3(3, 1, 2, 3).scale(&HPoly::constant(Rational::from(s)))
            );
        }
    }

    #[test]
    fn d1_examples() {
        let d = d1_from_presentation(&Presentation::polynomial(3));
        assert_eq!(d[&(1, 2)], &(&x(3, 1) * &x(3, 2)) - &(&x(3, 2) * &x(3, 1)));
        let sl2 = Presentation::from_lie(&LieData::sl2());
        let d = d1_from_presentation(&sl2);
        let expect = &(&(&x(3, 1) * &x(3, 2)) - &(&x(3, 2) * &x(3, 1))) - &x(3, 3).scale(&hp("h"));
        assert_eq!(d[&(1, 2)], expect);
        let strange = Potential::from_terms(3, [(Word::from_slice(&[3, 2, 1]), hp("-h"))])
            .unwrap()
            .to_presentation()
            .unwrap();
        let d = d1_from_presentation(&strange);
        let expect = &(&(&x(3, 1) * &x(3, 2)) - &(&x(3, 2) * &x(3, 1))) + &(&x(3, 2) * &x(3, 1)).scale(&hp("h"));
        assert_eq!(d[&(1, 2)], expect);
    }

    #[test]
    fn d2_default_examples() {
        let d = d2_default(3);
        let n = 3;
        let mut expect = KoszulPoly::zero(n);
        for (a, b, c) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
            expect = add(&expect, &mul(&kx(n, a), &kxi(n, b, c)));
            expect = add(&expect, &mul(&kxi(n, b, c), &kx(n, a)).scale(&hp("-1")));
        }
        assert_eq!(d[&(1, 2, 3)], expect);
        assert!(d2_default(2).is_empty());
        let d4 = d2_default(4);
        assert_eq!(d4.len(), 4);
        let mut expect = KoszulPoly::zero(4);
        for (a, b, c) in [(2, 3, 4), (3, 4, 2), (4, 2, 3)] {
            expect = add(&expect, &kx(4, a).commutator(&kxi(4, b, c)).unwrap());
        }
        assert_eq!(d4[&(2, 3, 4)], expect);
    }

    #[test]
    fn d2_lie_examples() {
        assert_eq!(d2_lie(&LieData::new(3)), d2_default(3));
        let d = LieData::new(3).with(1, 2, 1, 1).unwrap();
        let v = &d2_lie(&d)[&(1, 2, 3)];
        let expect = add(&d2_default(3)[&(1, 2, 3)], &kxi(3, 1, 3).scale(&hp("-h")));
        assert_eq!(v, &expect);
        // sl2: −ħ(c12^3 ξ33 + c23^2 ξ21 + c31^1 ξ12) = −2ħ(ξ21 + ξ12) = 0
        let v = &d2_lie(&LieData::sl2())[&(1, 2, 3)];
        assert_eq!(v, &d2_default(3)[&(1, 2, 3)]);
    }

    #[test]
    fn d2_quadratic_examples() {
        assert_eq!(d2_quadratic(&QuadData::new(3)), d2_default(3));
        let d = QuadData::new(3).with(2, 3, 1, 1, 1).unwrap();
        assert_eq!(d2_quadratic(&d), d2_default(3));
        let d = QuadData::new(3).with(2, 3, 1, 2, 1).unwrap();
        let expect = add(&d2_default(3)[&(1, 2, 3)], &mul(&kx(3, 1), &kxi(3, 1, 2)).scale(&hp("h")));
        assert_eq!(d2_quadratic(&d)[&(1, 2, 3)], expect);
    }

    #[test]
    fn apply_examples() {
        let p = Presentation::polynomial(3);
        let diff = poly_diff(&p, d2_default(3));
        let r = apply_d(&diff, &kxi(3, 1, 2)).unwrap();
        let c12 = &(&x(3, 1) * &x(3, 2)) - &(&x(3, 2) * &x(3, 1));
        assert_eq!(r, DImage::Even(c12.clone()));
        let r = apply_d(&diff, &mul(&kx(3, 1), &kxi(3, 1, 2))).unwrap();
        assert_eq!(r, DImage::Even(&x(3, 1) * &c12));
        assert!(composite(&diff, 1, 2, 3).is_zero());
        let xi123 = KoszulPoly::xi3(3, 1, 2, 3);
        let once = apply_d(&diff, &xi123).unwrap().into_koszul(3);
        assert_eq!(once, d2_default(3)[&(1, 2, 3)]);
        assert!(apply_d(&diff, &once).unwrap().is_zero());
    }

    #[test]
    fn apply_rejects_bad_input() {
        let diff = poly_diff(&Presentation::polynomial(3), d2_default(3));
        let mixed = KoszulPoly::from_terms(
            3,
            [
                (vec![KoszulSymbol::X(1)], HPoly::one()),
                (vec![KoszulSymbol::Xi2(1, 2)], HPoly::one()),
            ],
        )
        .unwrap();
        assert_eq!(apply_d(&diff, &mixed), Err(KoszulError::Inhomogeneous(0, -1)));
        assert_eq!(apply_d(&diff, &kx(3, 1)), Err(KoszulError::UnsupportedDegree(0)));
        assert_eq!(apply_d(&diff, &KoszulPoly::zero(3)), Ok(DImage::Zero));
    }

    #[test]
    fn two_odd_symbols_sign() {
        let diff = poly_diff(&Presentation::polynomial(3), d2_default(3));
        let w = mul(&kxi(3, 1, 2), &kxi(3, 2, 3));
        let got = apply_d(&diff, &w).unwrap().into_koszul(3);
        let d12 = KoszulPoly::from_ncpoly(&diff.d1(1, 2));
        let d23 = KoszulPoly::from_ncpoly(&diff.d1(2, 3));
        let expect = mul(&d12, &kxi(3, 2, 3)).try_sub(&mul(&kxi(3, 1, 2), &d23)).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn unperturbed_nilpotence() {
        for n in 1..=6 {
            let diff = poly_diff(&Presentation::polynomial(n), d2_default(n));
            for (i, j, k) in triples(n) {
                assert!(composite(&diff, i, j, k).is_zero(), "n={n} ({i},{j},{k})");
            }
        }
    }

    #[test]
    fn expansion_matches_nested_commutators() {
        let n = 4;
        let diff = poly_diff(&Presentation::polynomial(n), d2_default(n));
        for (i, j, k) in triples(n) {
            let mut got = expand_d(&diff, &diff.d2(i, j, k)).unwrap();
            let mut want = Vec::new();
            for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                // [x_a, [x_b, x_c]] = abc − acb − bca + cba
                for (w, s) in [([a, b, c], "1"), ([a, c, b], "-1"), ([b, c, a], "-1"), ([c, b, a], "1")] {
                    want.push((Word::from_indices(w), hp(s)));
                }
            }
            got.sort();
            want.sort();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn cycl_orientation_is_irrelevant() {
        let d = LieData::new(3).with(1, 2, 1, 1).and_then(|d| d.with(1, 3, 2, 1)).unwrap();
        let forward = &d2_lie(&d)[&(1, 2, 3)];
        let mut backward = default_value(3, 1, 2, 3);
        for (a, b, c) in [(1, 2, 3), (3, 1, 2), (2, 3, 1)].iter().rev() {
            for p in 1..=3 {
                let t = kxi(3, p, *c).scale(&HPoly::monomial(1, -d.c(*a, *b, p)));
                backward = add(&backward, &t);
            }
        }
        assert_eq!(forward, &backward);
    }

    #[test]
    fn custom_d2_validation() {
        let mut d2 = BTreeMap::new();
        d2.insert((1, 2, 3), kx(3, 1));
        assert_eq!(
            Differential::new(3, BTreeMap::new(), d2),
            Err(KoszulError::BadD2Value(1, 2, 3))
        );
    }
}
