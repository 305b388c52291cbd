//! Cyclic words, cyclic potentials and their necklace derivatives.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::freealg::{NCPoly, Word};
use crate::presentation::Presentation;
use crate::scalar::{FieldScalar, HPoly, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclicError {
    #[error("a cyclic word must contain at least one letter")]
    EmptyCycle,
    #[error("generator index {index} outside 1..={n}")]
    BadIndex { index: usize, n: usize },
    #[error("potential presentations are defined for n = 3 only (got n = {0})")]
    UnsupportedArity(usize),
    #[error("coefficient {coeff} of cycle {cycle} is not divisible by h")]
    NotDeformation { cycle: Word, coeff: HPoly },
}

/// Start index of the lexicographically least rotation (Booth's algorithm).
pub fn least_rotation(s: &[u8]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut fail = vec![-1isize; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = s[j % n];
        let mut i = fail[j - k - 1];
        while i != -1 && sj != s[(k + i as usize + 1) % n] {
            if sj < s[(k + i as usize + 1) % n] {
                k = j - i as usize - 1;
            }
            i = fail[i as usize];
        }
        if i == -1 && sj != s[k % n] {
            if sj < s[k % n] {
                k = j;
            }
            fail[j - k] = -1;
        } else {
            fail[j - k] = i + 1;
        }
    }
    k % n
}

/// Rotation class of a nonempty word, keyed by its least rotation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    rep: Word,
    n: usize,
}

impl CyclicWord {
    pub fn canon(w: &Word, n: usize) -> Result<Self, CyclicError> {
        if w.is_empty() {
            return Err(CyclicError::EmptyCycle);
        }
        if let Some(&bad) = w.letters().iter().find(|&&l| l == 0 || l as usize > n) {
            return Err(CyclicError::BadIndex { index: bad as usize, n });
        }
        let k = least_rotation(w.letters());
        let l = w.letters();
        let rep = Word::from_slice(&l[k..]).concat(&Word::from_slice(&l[..k]));
        Ok(CyclicWord { rep, n })
    }

    pub fn representative(&self) -> &Word {
        &self.rep
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All `len` cuttings of the necklace, with repetition for periodic words.
    pub fn cuttings(&self) -> impl Iterator<Item = Word> + '_ {
        let l = self.rep.letters();
        (0..l.len()).map(move |p| Word::from_slice(&l[p..]).concat(&Word::from_slice(&l[..p])))
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cycl({})", self.rep)
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Finitely supported combination of cyclic words with `ℚ[ħ]` coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Potential {
    n: usize,
    terms: BTreeMap<Word, HPoly>,
}

impl Potential {
    pub fn zero(n: usize) -> Self {
        Potential {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, HPoly)>>(n: usize, terms: I) -> Result<Self, CyclicError> {
        let mut p = Potential::zero(n);
        for (w, c) in terms {
            p.add_term(&w, &c)?;
        }
        Ok(p)
    }

    /// Adds `c·Cycl(w)`; `w` is canonicalised first.
    pub fn add_term(&mut self, w: &Word, c: &HPoly) -> Result<(), CyclicError> {
        let key = CyclicWord::canon(w, self.n)?.rep;
        let entry = self.terms.entry(key.clone()).or_insert_with(HPoly::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (CyclicWord, &HPoly)> {
        self.terms.iter().map(|(w, c)| {
            (
                CyclicWord {
                    rep: w.clone(),
                    n: self.n,
                },
                c,
            )
        })
    }

    pub fn scale(&self, c: &HPoly) -> Potential {
        let mut out = Potential::zero(self.n);
        for (w, d) in &self.terms {
            let e = d.clone() * c;
            if !e.is_zero() {
                out.terms.insert(w.clone(), e);
            }
        }
        out
    }

    /// Cyclic image of a linear polynomial (the projection `T(V) → T(V)/[T(V),T(V)]`).
    /// Constant terms are rejected since they have no cyclic class here.
    pub fn from_linear(p: &NCPoly<HPoly>) -> Result<Potential, CyclicError> {
        let mut out = Potential::zero(p.n());
        for (w, c) in p.terms() {
            out.add_term(w, c)?;
        }
        Ok(out)
    }

    /// Every coefficient lies in `ħ·ℚ[ħ]`.
    pub fn is_deformation(&self) -> bool {
        self.terms.values().all(|c| c.coeff(0).is_zero())
    }

    /// Necklace derivative `∂Φ/∂x_i`: for every occurrence of `x_i`, remove it
    /// and read the remaining letters cyclically starting right after it.
    pub fn derivative(&self, i: usize) -> Result<NCPoly<HPoly>, CyclicError> {
        if i == 0 || i > self.n {
            return Err(CyclicError::BadIndex { index: i, n: self.n });
        }
        let mut out = NCPoly::zero(self.n);
        for (w, c) in &self.terms {
            let l = w.letters();
            for (p, &letter) in l.iter().enumerate() {
                if letter as usize == i {
                    let cut = Word::from_slice(&l[p + 1..]).concat(&Word::from_slice(&l[..p]));
                    out.add_term(cut, c);
                }
            }
        }
        Ok(out)
    }

    /// The presentation `[x,y] = ∂Φ/∂z`, `[y,z] = ∂Φ/∂x`, `[z,x] = ∂Φ/∂y`
    /// with `(x,y,z) = (x1,x2,x3)`.
    ///
    /// Derivatives of x-degree above 2 are allowed; the resulting presentation
    /// then has `filtration_ok() == false`.
    pub fn to_presentation(&self) -> Result<Presentation, CyclicError> {
        if self.n != 3 {
            return Err(CyclicError::UnsupportedArity(self.n));
        }
        if let Some((w, c)) = self.terms.iter().find(|(_, c)| !c.coeff(0).is_zero()) {
            return Err(CyclicError::NotDeformation {
                cycle: w.clone(),
                coeff: c.clone(),
            });
        }
        let d1 = self.derivative(1)?;
        let d2 = self.derivative(2)?;
        let d3 = self.derivative(3)?;
        Ok(Presentation::new(3, [((1, 2), d3), ((2, 3), d1), ((3, 1), d2)])
            .expect("derivatives live in the ambient algebra"))
    }

    /// Recovers a potential whose presentation is `p`, if one exists (n = 3).
    ///
    /// Uses that `Σ_i ∂Φ/∂x_i · x_i` projects to `d·Φ_d` on each homogeneous
    /// component, then checks the candidate against `p`.
    pub fn from_presentation(p: &Presentation) -> Option<Potential> {
        if p.n() != 3 {
            return None;
        }
        // ∂Φ/∂x1 = φ23, ∂Φ/∂x2 = φ31, ∂Φ/∂x3 = φ12
        let partials = [p.phi(2, 3), p.phi(3, 1), p.phi(1, 2)];
        let mut euler = NCPoly::zero(3);
        for (i, d) in partials.iter().enumerate() {
            euler = &euler + &(d * &NCPoly::var(3, i + 1));
        }
        let projected = Potential::from_linear(&euler).ok()?;
        let mut candidate = Potential::zero(3);
        for (w, c) in &projected.terms {
            let inv = Rational::from(w.len() as i64).inv().expect("nonempty cycle");
            candidate.terms.insert(w.clone(), c.scale(&inv));
        }
        let ok = (1..=3).all(|i| candidate.derivative(i).ok().as_ref() == Some(&partials[i - 1]));
        ok.then_some(candidate)
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*Cycl({w})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential[n={}]({self})", self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(l: &[u8]) -> Word {
        Word::from_slice(l)
    }

    fn hp(s: &str) -> HPoly {
        s.parse().unwrap()
    }

    fn brute_min_rotation(l: &[u8]) -> Vec<u8> {
        (0..l.len())
            .map(|k| [&l[k..], &l[..k]].concat())
            .min()
            .unwrap()
    }

    #[test]
    fn canonical_representatives() {
        let c = |l: &[u8]| CyclicWord::canon(&w(l), 3).unwrap().representative().clone();
        assert_eq!(c(&[3, 2, 1]), w(&[1, 3, 2]));
        assert_eq!(c(&[1, 1, 1]), w(&[1, 1, 1]));
        assert_eq!(c(&[2, 1, 2, 1]), w(&[1, 2, 1, 2]));
        assert_eq!(CyclicWord::canon(&Word::empty(), 3), Err(CyclicError::EmptyCycle));
        assert_eq!(
            CyclicWord::canon(&w(&[4]), 3),
            Err(CyclicError::BadIndex { index: 4, n: 3 })
        );
    }

    #[test]
    fn booth_matches_brute_force_exhaustively() {
        // all words over 3 letters up to length 7
        for len in 1..=7u32 {
            for code in 0..3usize.pow(len) {
                let mut c = code;
                let l: Vec<u8> = (0..len)
                    .map(|_| {
                        let d = (c % 3) as u8 + 1;
                        c /= 3;
                        d
                    })
                    .collect();
                let k = least_rotation(&l);
                let got = [&l[k..], &l[..k]].concat();
                assert_eq!(got, brute_min_rotation(&l), "word {l:?}");
            }
        }
    }

    #[test]
    fn derivative_of_zyx() {
        let phi = Potential::from_terms(3, [(w(&[3, 2, 1]), hp("-1"))]).unwrap();
        let dx = phi.derivative(1).unwrap();
        assert_eq!(dx, NCPoly::monomial(3, w(&[3, 2]), hp("-1")));
        let dy = phi.derivative(2).unwrap();
        assert_eq!(dy, NCPoly::monomial(3, w(&[1, 3]), hp("-1")));
        assert_eq!(phi.derivative(4), Err(CyclicError::BadIndex { index: 4, n: 3 }));
    }

    #[test]
    fn derivative_of_cube() {
        let phi = Potential::from_terms(3, [(w(&[1, 1, 1]), hp("1"))]).unwrap();
        assert_eq!(phi.derivative(1).unwrap(), NCPoly::monomial(3, w(&[1, 1]), hp("3")));
        assert!(phi.derivative(2).unwrap().is_zero());
    }

    #[test]
    fn periodic_necklace_counts_every_occurrence() {
        let phi = Potential::from_terms(2, [(w(&[2, 1, 2, 1]), hp("1"))]).unwrap();
        assert_eq!(phi.derivative(1).unwrap(), NCPoly::monomial(2, w(&[2, 1, 2]), hp("2")));
    }

    #[test]
    fn strange_potential_presentation() {
        let phi = Potential::from_terms(3, [(w(&[3, 2, 1]), hp("-h"))]).unwrap();
        let p = phi.to_presentation().unwrap();
        assert_eq!(p.phi(1, 2), NCPoly::monomial(3, w(&[2, 1]), hp("-h")));
        assert_eq!(p.phi(2, 3), NCPoly::monomial(3, w(&[3, 2]), hp("-h")));
        assert_eq!(p.phi(3, 1), NCPoly::monomial(3, w(&[1, 3]), hp("-h")));
        assert!(p.filtration_ok());
    }

    #[test]
    fn xyz_potential_presentation() {
        let phi = Potential::from_terms(3, [(w(&[1, 2, 3]), hp("h"))]).unwrap();
        let p = phi.to_presentation().unwrap();
        assert_eq!(p.phi(1, 2), NCPoly::monomial(3, w(&[1, 2]), hp("h")));
        assert_eq!(p.phi(2, 3), NCPoly::monomial(3, w(&[2, 3]), hp("h")));
        assert_eq!(p.phi(3, 1), NCPoly::monomial(3, w(&[3, 1]), hp("h")));
    }

    #[test]
    fn zero_potential_gives_polynomial_presentation() {
        let p = Potential::zero(3).to_presentation().unwrap();
        assert_eq!(p, Presentation::polynomial(3));
    }

    #[test]
    fn presentation_errors() {
        let not_def = Potential::from_terms(3, [(w(&[1, 2, 3]), hp("1 + h"))]).unwrap();
        assert!(matches!(not_def.to_presentation(), Err(CyclicError::NotDeformation { .. })));
        let four = Potential::from_terms(4, [(w(&[1, 2, 3]), hp("h"))]).unwrap();
        assert_eq!(four.to_presentation(), Err(CyclicError::UnsupportedArity(4)));
        let quartic = Potential::from_terms(3, [(w(&[1, 2, 3, 3]), hp("h"))]).unwrap();
        let p = quartic.to_presentation().unwrap();
        assert!(!p.filtration_ok());
    }

    #[test]
    fn reconstruct_from_presentation() {
        let phi = Potential::from_terms(
            3,
            [(w(&[3, 2, 1]), hp("-h")), (w(&[1, 1, 2, 3]), hp("2h^2")), (w(&[2]), hp("h"))],
        )
        .unwrap();
        let p = phi.to_presentation().unwrap();
        assert_eq!(Potential::from_presentation(&p), Some(phi));
        // [z, z]/2 is a potential for φ12 = ħ·x3, but nothing produces φ12 = ħ·x1 alone
        let shaped = Presentation::new(3, [((1, 2), NCPoly::monomial(3, w(&[3]), hp("h")))]).unwrap();
        assert!(Potential::from_presentation(&shaped).is_some());
        let unshaped = Presentation::new(3, [((1, 2), NCPoly::monomial(3, w(&[1]), hp("h")))]).unwrap();
        assert_eq!(Potential::from_presentation(&unshaped), None);
    }
}
