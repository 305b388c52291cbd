//! PBW certificates `d1 ∘ d2 = 0`, Jacobi and quadratic-tensor tests, and
//! obstruction extraction.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::freealg::{NCPoly, Word};
use crate::koszul::{self, Differential, KoszulError, KoszulPoly};
use crate::presentation::{self, CertificatePath, LieData, Presentation, QuadData};
use crate::scalar::{HPoly, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("d2 choice '{choice}' does not apply; available paths: {available}")]
    PathMismatch { choice: String, available: String },
    #[error("phi({i}, {j}) is not divisible by h")]
    NotDeformation { i: usize, j: usize },
    #[error("the certificate passes; there is no obstruction")]
    NoObstruction,
    #[error("({0}, {1}, {2}) is not a triple of distinct indices in range")]
    BadTriple(usize, usize, usize),
    #[error(transparent)]
    Koszul(#[from] KoszulError),
}

/// Which `d2` to pair with `d1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum D2Choice {
    Default,
    Lie,
    Quadratic,
    Custom(BTreeMap<(usize, usize, usize), KoszulPoly>),
}

impl D2Choice {
    pub fn name(&self) -> &'static str {
        match self {
            D2Choice::Default => "default",
            D2Choice::Lie => "lie",
            D2Choice::Quadratic => "quadratic",
            D2Choice::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for D2Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

pub const CONCLUSION_LINEAR: &str =
    "descending PBW-like property established; PBW at every specialization (linear φ)";
pub const CONCLUSION_GENERIC: &str = "descending PBW-like property established; PBW for all but countably many \
     specializations (bad set not computed)";
pub const CONCLUSION_FAIL: &str = "certificate fails for this d2; inconclusive for descending PBW";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub verdict: Verdict,
    pub d2: String,
    /// `d1 ∘ d2 (ξ_ijk)` for every `i < j < k`.
    pub residues: BTreeMap<(usize, usize, usize), NCPoly<HPoly>>,
    pub linear: bool,
    pub conclusion: &'static str,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failing_triples(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.residues.iter().filter(|(_, r)| !r.is_zero()).map(|(&t, _)| t)
    }
}

/// Builds the differential for a choice, checking applicability.
pub fn differential(p: &Presentation, choice: &D2Choice) -> Result<Differential, CertifyError> {
    let n = p.n();
    let mismatch = || {
        let report = presentation::validate(p);
        let available: Vec<String> = report.paths.iter().map(|c| c.to_string()).collect();
        CertifyError::PathMismatch {
            choice: choice.name().to_string(),
            available: available.join(", "),
        }
    };
    let d2 = match choice {
        D2Choice::Default => koszul::d2_default(n),
        D2Choice::Lie => koszul::d2_lie(&LieData::from_presentation(p).ok_or_else(mismatch)?),
        D2Choice::Quadratic => koszul::d2_quadratic(&QuadData::from_presentation(p).ok_or_else(mismatch)?),
        D2Choice::Custom(m) => m.clone(),
    };
    Ok(Differential::new(n, koszul::d1_from_presentation(p), d2)?)
}

pub fn certify(p: &Presentation, choice: &D2Choice) -> Result<CertificateReport, CertifyError> {
    for ((i, j), phi) in p.entries() {
        if phi.terms().any(|(_, c)| !c.coeff(0).is_zero()) {
            return Err(CertifyError::NotDeformation { i, j });
        }
    }
    let diff = differential(p, choice)?;
    let residues: BTreeMap<_, _> = koszul::triples(p.n())
        .map(|(i, j, k)| ((i, j, k), koszul::composite(&diff, i, j, k)))
        .collect();
    let pass = residues.values().all(NCPoly::is_zero);
    let linear = p.is_linear();
    let conclusion = match (pass, linear) {
        (true, true) => CONCLUSION_LINEAR,
        (true, false) => CONCLUSION_GENERIC,
        (false, _) => CONCLUSION_FAIL,
    };
    Ok(CertificateReport {
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        d2: choice.name().to_string(),
        residues,
        linear,
        conclusion,
    })
}

/// Certificate paths suggested by [`validate`](presentation::validate),
/// mapped to `d2` choices.
pub fn suggested_choice(p: &Presentation) -> D2Choice {
    let report = presentation::validate(p);
    if report.has_path(CertificatePath::Lie) {
        D2Choice::Lie
    } else if report.has_path(CertificatePath::Quadratic) {
        D2Choice::Quadratic
    } else {
        D2Choice::Default
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionGenerator {
    pub triple: (usize, usize, usize),
    pub poly: NCPoly<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionReport {
    pub hbar_order: usize,
    pub generators: Vec<ObstructionGenerator>,
}

/// Lowest-order `ħ` coefficients of the nonzero residues.
pub fn obstruction(p: &Presentation, choice: &D2Choice) -> Result<ObstructionReport, CertifyError> {
    obstruction_from(&certify(p, choice)?)
}

pub fn obstruction_from(report: &CertificateReport) -> Result<ObstructionReport, CertifyError> {
    let hbar_order = report
        .residues
        .values()
        .filter_map(NCPoly::hbar_valuation)
        .min()
        .ok_or(CertifyError::NoObstruction)?;
    let generators = report
        .residues
        .iter()
        .map(|(&triple, r)| ObstructionGenerator {
            triple,
            poly: r.hbar_coefficient(hbar_order),
        })
        .filter(|g| !g.poly.is_zero())
        .collect();
    Ok(ObstructionReport { hbar_order, generators })
}

fn check_triple(n: usize, i: usize, j: usize, k: usize) -> Result<(), CertifyError> {
    let ok = [i, j, k].iter().all(|&t| (1..=n).contains(&t)) && i != j && j != k && i != k;
    if ok {
        Ok(())
    } else {
        Err(CertifyError::BadTriple(i, j, k))
    }
}

/// `ħ² Σ_{a,b} (c_ij^a c_ak^b + c_jk^a c_ai^b + c_ki^a c_aj^b) x_b`.
pub fn jacobiator(d: &LieData, i: usize, j: usize, k: usize) -> Result<NCPoly<HPoly>, CertifyError> {
    let n = d.n();
    check_triple(n, i, j, k)?;
    let mut out = NCPoly::zero(n);
    for b in 1..=n {
        let mut s = Rational::zero();
        for a in 1..=n {
            for (p, q, r) in [(i, j, k), (j, k, i), (k, i, j)] {
                let left = d.c(p, q, a);
                if !left.is_zero() {
                    s += &(left * &d.c(a, r, b));
                }
            }
        }
        out.add_term(Word::letter(b), &HPoly::monomial(2, s));
    }
    Ok(out)
}

/// Dense `α[i][j][a][b]` with the signed convention, zero-based.
struct Dense {
    n: usize,
    v: Vec<Rational>,
}

impl Dense {
    fn alpha(d: &QuadData) -> Self {
        let n = d.n();
        let mut v = vec![Rational::zero(); n.pow(4)];
        for ((i, j, a, b), c) in d.entries() {
            let (i, j, a, b) = (i - 1, j - 1, a - 1, b - 1);
            v[((i * n + j) * n + a) * n + b] = c.clone();
            v[((j * n + i) * n + a) * n + b] = -c.clone();
        }
        Dense { n, v }
    }

    fn beta(d: &QuadData) -> Self {
        let a = Dense::alpha(d);
        let n = a.n;
        let mut v = vec![Rational::zero(); n.pow(4)];
        for i in 0..n {
            for j in 0..n {
                for x in 0..n {
                    for y in 0..n {
                        v[((i * n + j) * n + x) * n + y] = a.get(i, j, x, y).clone() + a.get(i, j, y, x).clone();
                    }
                }
            }
        }
        Dense { n, v }
    }

    fn get(&self, i: usize, j: usize, a: usize, b: usize) -> &Rational {
        let n = self.n;
        &self.v[((i * n + j) * n + a) * n + b]
    }
}

/// Violating index tuple (1-based) and the offending value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorWitness {
    pub indices: [usize; 6],
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorCheck {
    pub verdict: Verdict,
    pub witness: Option<TensorWitness>,
}

impl TensorCheck {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn from_witness(witness: Option<TensorWitness>) -> Self {
        TensorCheck {
            verdict: if witness.is_none() { Verdict::Pass } else { Verdict::Fail },
            witness,
        }
    }
}

/// `Cycl_{ijk} Σ_s (α_jk^{sb} α_is^{cd} + α_jk^{cs} α_is^{db})`, zero-based indices.
fn quad_value(al: &Dense, [i, j, k, b, c, d]: [usize; 6]) -> Rational {
    let mut v = Rational::zero();
    for (p, q, r) in [(i, j, k), (j, k, i), (k, i, j)] {
        for s in 0..al.n {
            let x = al.get(q, r, s, b);
            if !x.is_zero() {
                v += &(x.clone() * al.get(p, s, c, d));
            }
            let y = al.get(q, r, c, s);
            if !y.is_zero() {
                v += &(y.clone() * al.get(p, s, d, b));
            }
        }
    }
    v
}

/// Scans every `(i, j, k, b, c, d) ∈ [n]⁶` in lexicographic order.
pub fn check_quadratic_condition(d: &QuadData) -> TensorCheck {
    let al = Dense::alpha(d);
    let n = d.n();
    let total = n.pow(6);
    let witness = (0..total).find_map(|mut t| {
        let mut idx = [0usize; 6];
        for slot in idx.iter_mut().rev() {
            *slot = t % n;
            t /= n;
        }
        let v = quad_value(&al, idx);
        (!v.is_zero()).then(|| TensorWitness {
            indices: idx.map(|x| x + 1),
            value: v,
        })
    });
    TensorCheck::from_witness(witness)
}

/// Value of the quadratic condition at a 1-based tuple.
pub fn quadratic_condition_value(d: &QuadData, indices: [usize; 6]) -> Rational {
    quad_value(&Dense::alpha(d), indices.map(|x| x - 1))
}

/// `Σ_s (β_is^{ab} β_jk^{sc} + β_js^{ab} β_ki^{sc} + β_ks^{ab} β_ij^{sc})`, zero-based.
fn poisson_raw(be: &Dense, i: usize, j: usize, k: usize, a: usize, b: usize, c: usize) -> Rational {
    let mut v = Rational::zero();
    for (p, q, r) in [(i, j, k), (j, k, i), (k, i, j)] {
        for s in 0..be.n {
            let x = be.get(p, s, a, b);
            if !x.is_zero() {
                v += &(x.clone() * be.get(q, r, s, c));
            }
        }
    }
    v
}

/// Poisson condition for `β_ij^{ab} = α_ij^{ab} + α_ij^{ba}`, symmetrized over
/// the upper indices `(a, b, c)`. Witness indices are `(i, j, k, a, b, c)`.
pub fn check_poisson(d: &QuadData) -> TensorCheck {
    let be = Dense::beta(d);
    let n = d.n();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for a in 0..n {
                    for b in a..n {
                        for c in b..n {
                            let mut v = Rational::zero();
                            for [x, y, z] in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                                v += &poisson_raw(&be, i, j, k, x, y, z);
                            }
                            if !v.is_zero() {
                                return TensorCheck::from_witness(Some(TensorWitness {
                                    indices: [i + 1, j + 1, k + 1, a + 1, b + 1, c + 1],
                                    value: v,
                                }));
                            }
                        }
                    }
                }
            }
        }
    }
    TensorCheck::from_witness(None)
}
