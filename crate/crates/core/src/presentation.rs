//! Deformed presentations `A = T(V)[ħ] / (x_i x_j − x_j x_i − φ_ij)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cyclic::Potential;
use crate::freealg::{NCPoly, Word};
use crate::scalar::{HPoly, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("a presentation needs at least one generator")]
    NoGenerators,
    #[error("pair ({i}, {j}) is not a pair of distinct generators in 1..={n}")]
    BadPair { i: usize, j: usize, n: usize },
    #[error("index {index} outside 1..={n}")]
    BadIndex { index: usize, n: usize },
    #[error("phi({i}, {j}) lives in an algebra with {got} generators, expected {n}")]
    AmbientMismatch { i: usize, j: usize, got: usize, n: usize },
}

/// Generators `x_1..x_n` with relations `x_i x_j − x_j x_i = φ_ij`, `i < j`.
///
/// Only `i < j` entries are stored; [`phi`](Presentation::phi) extends them
/// by `φ_ji = −φ_ij` and `φ_ii = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct Presentation {
    n: usize,
    phi: BTreeMap<(usize, usize), NCPoly<HPoly>>,
    filtration_ok: bool,
}

impl Presentation {
    /// Builds a presentation from `((i, j), φ_ij)` entries. Entries with
    /// `i > j` are stored as `φ_ji = −φ_ij`; repeated pairs accumulate.
    pub fn new<I>(n: usize, entries: I) -> Result<Self, PresentationError>
    where
        I: IntoIterator<Item = ((usize, usize), NCPoly<HPoly>)>,
    {
        if n == 0 {
            return Err(PresentationError::NoGenerators);
        }
        let mut phi: BTreeMap<(usize, usize), NCPoly<HPoly>> = BTreeMap::new();
        for ((i, j), p) in entries {
            if i == j || i == 0 || j == 0 || i > n || j > n {
                return Err(PresentationError::BadPair { i, j, n });
            }
            if p.n() != n {
                return Err(PresentationError::AmbientMismatch { i, j, got: p.n(), n });
            }
            let (key, val) = if i < j { ((i, j), p) } else { ((j, i), -&p) };
            let slot = phi.entry(key).or_insert_with(|| NCPoly::zero(n));
            *slot = &*slot + &val;
        }
        phi.retain(|_, p| !p.is_zero());
        let filtration_ok = phi.values().all(|p| p.deg_x().map_or(true, |d| d <= 2));
        Ok(Presentation { n, phi, filtration_ok })
    }

    /// All `φ_ij = 0`: the polynomial algebra `S(V)[ħ]`.
    pub fn polynomial(n: usize) -> Self {
        Presentation {
            n,
            phi: BTreeMap::new(),
            filtration_ok: true,
        }
    }

    /// `φ_ij = ħ Σ_k c_ij^k x_k`.
    pub fn from_lie(d: &LieData) -> Self {
        let mut entries: BTreeMap<(usize, usize), NCPoly<HPoly>> = BTreeMap::new();
        for (&(i, j, k), c) in &d.c {
            let slot = entries.entry((i, j)).or_insert_with(|| NCPoly::zero(d.n));
            slot.add_term(Word::letter(k), &HPoly::monomial(1, c.clone()));
        }
        Presentation::new(d.n, entries).expect("LieData indices are validated")
    }

    /// `φ_ij = ħ Σ_{a,b} α_ij^{ab} x_a x_b`.
    pub fn from_quadratic(d: &QuadData) -> Self {
        let mut entries: BTreeMap<(usize, usize), NCPoly<HPoly>> = BTreeMap::new();
        for (&(i, j, a, b), c) in &d.alpha {
            let slot = entries.entry((i, j)).or_insert_with(|| NCPoly::zero(d.n));
            slot.add_term(Word::from_indices([a, b]), &HPoly::monomial(1, c.clone()));
        }
        Presentation::new(d.n, entries).expect("QuadData indices are validated")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Signed accessor: `φ_ji = −φ_ij`, `φ_ii = 0`.
    pub fn phi(&self, i: usize, j: usize) -> NCPoly<HPoly> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.phi.get(&(i, j)).cloned().unwrap_or_else(|| NCPoly::zero(self.n)),
            std::cmp::Ordering::Greater => self.phi.get(&(j, i)).map(|p| -p).unwrap_or_else(|| NCPoly::zero(self.n)),
            std::cmp::Ordering::Equal => NCPoly::zero(self.n),
        }
    }

    /// Stored nonzero entries, `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &NCPoly<HPoly>)> {
        self.phi.iter().map(|(&k, v)| (k, v))
    }

    /// Every `deg_x φ_ij ≤ 2`.
    pub fn filtration_ok(&self) -> bool {
        self.filtration_ok
    }

    /// The defining relation `x_i x_j − x_j x_i − φ_ij` for `i < j`.
    pub fn relation(&self, i: usize, j: usize) -> NCPoly<HPoly> {
        let xi = NCPoly::var(self.n, i);
        let xj = NCPoly::var(self.n, j);
        &xi.commutator(&xj).expect("same ambient") - &self.phi(i, j)
    }

    /// All pairs `i < j` with their relation.
    pub fn relations(&self) -> Vec<((usize, usize), NCPoly<HPoly>)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                out.push(((i, j), self.relation(i, j)));
            }
        }
        out
    }

    /// Every φ has x-degree at most one.
    pub fn is_linear(&self) -> bool {
        self.phi.values().all(|p| p.deg_x().map_or(true, |d| d <= 1))
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                writeln!(f, "  [x{i}, x{j}] = {}", self.phi(i, j))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Structure constants `c_ij^k` (stored for `i < j`; `c_ji^k = −c_ij^k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieData {
    n: usize,
    c: BTreeMap<(usize, usize, usize), Rational>,
}

impl LieData {
    pub fn new(n: usize) -> Self {
        LieData { n, c: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `value` to `c_ij^k` (to `−c_ji^k` when `i > j`).
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Rational) -> Result<(), PresentationError> {
        let n = self.n;
        if i == j || i == 0 || j == 0 || i > n || j > n {
            return Err(PresentationError::BadPair { i, j, n });
        }
        if k == 0 || k > n {
            return Err(PresentationError::BadIndex { index: k, n });
        }
        let (key, v) = if i < j { ((i, j, k), value) } else { ((j, i, k), -value) };
        let e = self.c.entry(key).or_insert_with(Rational::zero);
        *e += &v;
        if e.is_zero() {
            self.c.remove(&key);
        }
        Ok(())
    }

    pub fn with(mut self, i: usize, j: usize, k: usize, value: impl Into<Rational>) -> Result<Self, PresentationError> {
        self.set(i, j, k, value.into())?;
        Ok(self)
    }

    /// Signed accessor.
    pub fn c(&self, i: usize, j: usize, k: usize) -> Rational {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.c.get(&(i, j, k)).cloned().unwrap_or_else(Rational::zero),
            std::cmp::Ordering::Greater => -self.c.get(&(j, i, k)).cloned().unwrap_or_else(Rational::zero),
            std::cmp::Ordering::Equal => Rational::zero(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), &Rational)> {
        self.c.iter().map(|(&k, v)| (k, v))
    }

    /// Reads structure constants back from a presentation whose every φ is
    /// `ħ·(linear form)`.
    pub fn from_presentation(p: &Presentation) -> Option<LieData> {
        let mut d = LieData::new(p.n());
        for ((i, j), phi) in p.entries() {
            for (w, c) in phi.terms() {
                if w.len() != 1 || c.degree() != Some(1) || !c.coeff(0).is_zero() {
                    return None;
                }
                d.set(i, j, w.letters()[0] as usize, c.coeff(1)).ok()?;
            }
        }
        Some(d)
    }

    /// `sl_2` in the basis `(e, f, h) = (x1, x2, x3)`.
    pub fn sl2() -> Self {
        LieData::new(3)
            .with(1, 2, 3, 1)
            .and_then(|d| d.with(3, 1, 1, 2))
            .and_then(|d| d.with(3, 2, 2, -2))
            .expect("valid indices")
    }

    /// Heisenberg algebra `[x1, x2] = x3`.
    pub fn heisenberg() -> Self {
        LieData::new(3).with(1, 2, 3, 1).expect("valid indices")
    }
}

/// Quadratic tensor `α_ij^{ab}` (stored for `i < j`; `α_ji^{ab} = −α_ij^{ab}`;
/// no symmetry in `(a, b)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadData {
    n: usize,
    alpha: BTreeMap<(usize, usize, usize, usize), Rational>,
}

impl QuadData {
    pub fn new(n: usize) -> Self {
        QuadData {
            n,
            alpha: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, i: usize, j: usize, a: usize, b: usize, value: Rational) -> Result<(), PresentationError> {
        let n = self.n;
        if i == j || i == 0 || j == 0 || i > n || j > n {
            return Err(PresentationError::BadPair { i, j, n });
        }
        for idx in [a, b] {
            if idx == 0 || idx > n {
                return Err(PresentationError::BadIndex { index: idx, n });
            }
        }
        let (key, v) = if i < j { ((i, j, a, b), value) } else { ((j, i, a, b), -value) };
        let e = self.alpha.entry(key).or_insert_with(Rational::zero);
        *e += &v;
        if e.is_zero() {
            self.alpha.remove(&key);
        }
        Ok(())
    }

    pub fn with(mut self, i: usize, j: usize, a: usize, b: usize, value: impl Into<Rational>) -> Result<Self, PresentationError> {
        self.set(i, j, a, b, value.into())?;
        Ok(self)
    }

    /// Signed accessor.
    pub fn alpha(&self, i: usize, j: usize, a: usize, b: usize) -> Rational {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.alpha.get(&(i, j, a, b)).cloned().unwrap_or_else(Rational::zero),
            std::cmp::Ordering::Greater => -self.alpha.get(&(j, i, a, b)).cloned().unwrap_or_else(Rational::zero),
            std::cmp::Ordering::Equal => Rational::zero(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), &Rational)> {
        self.alpha.iter().map(|(&k, v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Reads `α` back from a presentation whose every φ is `ħ·(quadratic form)`.
    pub fn from_presentation(p: &Presentation) -> Option<QuadData> {
        let mut d = QuadData::new(p.n());
        for ((i, j), phi) in p.entries() {
            for (w, c) in phi.terms() {
                if w.len() != 2 || c.degree() != Some(1) || !c.coeff(0).is_zero() {
                    return None;
                }
                let l = w.letters();
                d.set(i, j, l[0] as usize, l[1] as usize, c.coeff(1)).ok()?;
            }
        }
        Some(d)
    }
}

/// Certificate routes a presentation qualifies for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificatePath {
    /// Every φ is ħ times a linear form.
    Lie,
    /// Every φ is ħ times a quadratic form.
    Quadratic,
    /// n = 3 and the φ are necklace derivatives of a potential.
    Potential,
    /// None of the above.
    Generic,
}

impl fmt::Display for CertificatePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificatePath::Lie => "lie",
            CertificatePath::Quadratic => "quadratic",
            CertificatePath::Potential => "potential",
            CertificatePath::Generic => "generic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationIssue {
    /// φ_ij has a nonzero ħ⁰ part.
    NotDeformation { i: usize, j: usize },
    /// φ_ij has x-degree above 2; Hilbert comparisons are disabled.
    FiltrationUnbounded { i: usize, j: usize, deg_x: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairSummary {
    pub i: usize,
    pub j: usize,
    pub deg_x: Option<usize>,
    pub hbar_divisible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    /// Every φ is divisible by ħ.
    pub valid: bool,
    pub filtration_ok: bool,
    pub paths: BTreeSet<CertificatePath>,
    pub pairs: Vec<PairSummary>,
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn has_path(&self, path: CertificatePath) -> bool {
        self.paths.contains(&path)
    }
}

pub fn validate(p: &Presentation) -> ValidationReport {
    let mut issues = Vec::new();
    let mut pairs = Vec::new();
    for ((i, j), phi) in p.entries() {
        let hbar_divisible = phi.terms().all(|(_, c)| c.coeff(0).is_zero());
        let deg_x = phi.deg_x().ok();
        if !hbar_divisible {
            issues.push(ValidationIssue::NotDeformation { i, j });
        }
        if let Some(d) = deg_x.filter(|&d| d > 2) {
            issues.push(ValidationIssue::FiltrationUnbounded { i, j, deg_x: d });
        }
        pairs.push(PairSummary {
            i,
            j,
            deg_x,
            hbar_divisible,
        });
    }
    let valid = !issues
        .iter()
        .any(|e| matches!(e, ValidationIssue::NotDeformation { .. }));
    let mut paths = BTreeSet::new();
    if LieData::from_presentation(p).is_some() {
        paths.insert(CertificatePath::Lie);
    }
    if QuadData::from_presentation(p).is_some() {
        paths.insert(CertificatePath::Quadratic);
    }
    if valid && Potential::from_presentation(p).is_some() {
        paths.insert(CertificatePath::Potential);
    }
    if paths.is_empty() {
        paths.insert(CertificatePath::Generic);
    }
    ValidationReport {
        n: p.n(),
        valid,
        filtration_ok: p.filtration_ok(),
        paths,
        pairs,
        issues,
    }
}
