//! JSON documents: presentations, polynomials, custom differentials and reports.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::certify::{CertificateReport, ObstructionReport, TensorCheck};
use crate::cyclic::{CyclicError, Potential};
use crate::freealg::{FreeAlgError, NCPoly, Word};
use crate::koszul::{KoszulError, KoszulPoly, KoszulSymbol};
use crate::presentation::{LieData, Presentation, PresentationError, QuadData};
use crate::rewrite::{DegreeVerdict, HilbertReport, Mode, TorsionOutcome};
use crate::scalar::{HPoly, Rational};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    #[error(transparent)]
    Cyclic(#[from] CyclicError),
    #[error(transparent)]
    Koszul(#[from] KoszulError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WordDoc {
    Letters(Vec<usize>),
    Text(String),
}

fn parse_word_text(s: &str) -> Result<Word, IoError> {
    let s = s.trim();
    if s.is_empty() || s == "1" {
        return Ok(Word::empty());
    }
    s.split('*')
        .map(|part| {
            let p = part.trim();
            p.strip_prefix('x')
                .and_then(|d| d.parse::<usize>().ok())
                .ok_or_else(|| IoError::Schema(format!("cannot read '{p}' as a generator (expected x1, x2, ...)")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Word::from_indices)
}

impl WordDoc {
    fn to_word(&self) -> Result<Word, IoError> {
        match self {
            WordDoc::Letters(v) => Ok(Word::from_indices(v.iter().copied())),
            WordDoc::Text(s) => parse_word_text(s),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    word: WordDoc,
    coeff: HPoly,
}

fn terms_to_poly(n: usize, terms: &[TermDoc]) -> Result<NCPoly<HPoly>, IoError> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        out.push((t.word.to_word()?, t.coeff.clone()));
    }
    Ok(NCPoly::from_terms(n, out)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PhiDoc {
    i: usize,
    j: usize,
    terms: Vec<TermDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LieEntry {
    i: usize,
    j: usize,
    k: usize,
    value: Rational,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LieDoc {
    n: usize,
    c: Vec<LieEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadEntry {
    i: usize,
    j: usize,
    a: usize,
    b: usize,
    value: Rational,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadDoc {
    n: usize,
    alpha: Vec<QuadEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialDoc {
    n: usize,
    terms: Vec<TermDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationDoc {
    n: Option<usize>,
    scalar: Option<String>,
    phi: Option<Vec<PhiDoc>>,
    lie: Option<LieDoc>,
    quadratic: Option<QuadDoc>,
    potential: Option<PotentialDoc>,
    #[serde(default)]
    #[allow(dead_code)]
    comment: Option<Value>,
}

fn lie_from_doc(d: &LieDoc) -> Result<LieData, IoError> {
    let mut out = LieData::new(d.n);
    for e in &d.c {
        out.set(e.i, e.j, e.k, e.value.clone())?;
    }
    Ok(out)
}

fn quad_from_doc(d: &QuadDoc) -> Result<QuadData, IoError> {
    let mut out = QuadData::new(d.n);
    for e in &d.alpha {
        out.set(e.i, e.j, e.a, e.b, e.value.clone())?;
    }
    Ok(out)
}

fn potential_from_doc(d: &PotentialDoc) -> Result<Potential, IoError> {
    let mut out = Vec::with_capacity(d.terms.len());
    for t in &d.terms {
        out.push((t.word.to_word()?, t.coeff.clone()));
    }
    Ok(Potential::from_terms(d.n, out)?)
}

/// What a presentation document was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Explicit,
    Lie(LieData),
    Quadratic(QuadData),
    Potential(Potential),
}

/// Reads any presentation document: explicit `phi`, or a `lie`,
/// `quadratic` or `potential` block.
pub fn parse_presentation(text: &str) -> Result<(Presentation, Source), IoError> {
    let doc: PresentationDoc = serde_json::from_str(text)?;
    let blocks = [doc.phi.is_some(), doc.lie.is_some(), doc.quadratic.is_some(), doc.potential.is_some()];
    if blocks.iter().filter(|&&b| b).count() != 1 {
        return Err(IoError::Schema(
            "expected exactly one of \"phi\", \"lie\", \"quadratic\", \"potential\"".into(),
        ));
    }
    if let Some(s) = &doc.scalar {
        if s != "hpoly" {
            return Err(IoError::Schema(format!("unsupported scalar '{s}' (only \"hpoly\")")));
        }
    }
    if let Some(phi) = &doc.phi {
        let n = doc.n.ok_or_else(|| IoError::Schema("explicit presentations need \"n\"".into()))?;
        let mut entries = Vec::with_capacity(phi.len());
        for e in phi {
            entries.push(((e.i, e.j), terms_to_poly(n, &e.terms)?));
        }
        return Ok((Presentation::new(n, entries)?, Source::Explicit));
    }
    if let Some(l) = &doc.lie {
        let d = lie_from_doc(l)?;
        return Ok((Presentation::from_lie(&d), Source::Lie(d)));
    }
    if let Some(q) = &doc.quadratic {
        let d = quad_from_doc(q)?;
        return Ok((Presentation::from_quadratic(&d), Source::Quadratic(d)));
    }
    let pot = potential_from_doc(doc.potential.as_ref().expect("one block present"))?;
    Ok((pot.to_presentation()?, Source::Potential(pot)))
}

/// Reads a potential document (`{"potential": {...}}` or the bare block).
pub fn parse_potential(text: &str) -> Result<Potential, IoError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        Wrapped { potential: PotentialDoc },
        Bare(PotentialDoc),
    }
    let doc: Doc = serde_json::from_str(text)?;
    match doc {
        Doc::Wrapped { potential } => potential_from_doc(&potential),
        Doc::Bare(p) => potential_from_doc(&p),
    }
}

/// Reads a polynomial: a bare term list or `{"n": .., "terms": [..]}`.
pub fn parse_poly(text: &str, n: usize) -> Result<NCPoly<HPoly>, IoError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        Bare(Vec<TermDoc>),
        Wrapped { n: Option<usize>, terms: Vec<TermDoc> },
    }
    match serde_json::from_str::<Doc>(text)? {
        Doc::Bare(t) => terms_to_poly(n, &t),
        Doc::Wrapped { n: m, terms } => {
            if let Some(m) = m.filter(|&m| m != n) {
                return Err(IoError::Schema(format!("polynomial has n = {m}, presentation has n = {n}")));
            }
            terms_to_poly(n, &terms)
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
enum SymbolDoc {
    #[serde(rename = "x")]
    X(usize),
    #[serde(rename = "xi2")]
    Xi2([usize; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KTermDoc {
    word: Vec<SymbolDoc>,
    coeff: HPoly,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct D2Entry {
    triple: [usize; 3],
    value: Vec<KTermDoc>,
}

/// Reads a custom `d2`: `[{"triple": [i,j,k], "value": [{"word": [{"x":1},{"xi2":[2,3]}], "coeff": ..}]}]`.
/// Triples and `ξ` indices are re-sorted with the matching sign.
pub fn parse_custom_d2(text: &str, n: usize) -> Result<BTreeMap<(usize, usize, usize), KoszulPoly>, IoError> {
    let doc: Vec<D2Entry> = serde_json::from_str(text)?;
    let mut out: BTreeMap<(usize, usize, usize), KoszulPoly> = BTreeMap::new();
    for e in doc {
        let [i, j, k] = e.triple;
        let (sign, sym) = KoszulSymbol::xi3(i, j, k)
            .ok_or_else(|| IoError::Schema(format!("triple ({i}, {j}, {k}) has a repeated index")))?;
        let KoszulSymbol::Xi3(a, b, c) = sym else { unreachable!() };
        let mut v = KoszulPoly::zero(n);
        for t in e.value {
            let mut word = Vec::with_capacity(t.word.len());
            let mut coeff = t.coeff.scale(&Rational::from(sign as i64));
            for s in t.word {
                match s {
                    SymbolDoc::X(i) => word.push(KoszulSymbol::x(i)),
                    SymbolDoc::Xi2([p, q]) => {
                        let (s2, sym) = KoszulSymbol::xi2(p, q)
                            .ok_or_else(|| IoError::Schema(format!("xi2 with repeated index {p}")))?;
                        if s2 < 0 {
                            coeff = -coeff;
                        }
                        word.push(sym);
                    }
                }
            }
            v = v.try_add(&KoszulPoly::from_terms(n, [(word, coeff)])?)?;
        }
        let slot = out.entry((a as usize, b as usize, c as usize)).or_insert_with(|| KoszulPoly::zero(n));
        *slot = slot.try_add(&v)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

pub fn hpoly_json(c: &HPoly) -> Value {
    serde_json::to_value(c).expect("HPoly serializes")
}

pub fn word_json(w: &Word) -> Value {
    json!(w.letters())
}

/// Terms in increasing deglex order.
pub fn poly_json(p: &NCPoly<HPoly>) -> Value {
    Value::Array(
        p.terms()
            .map(|(w, c)| json!({"word": word_json(w), "coeff": hpoly_json(c)}))
            .collect(),
    )
}

pub fn rpoly_json(p: &NCPoly<Rational>) -> Value {
    Value::Array(
        p.terms()
            .map(|(w, c)| json!({"word": word_json(w), "coeff": c.to_string()}))
            .collect(),
    )
}

/// Canonical explicit form.
pub fn presentation_json(p: &Presentation) -> Value {
    let phi: Vec<Value> = p
        .entries()
        .map(|((i, j), v)| json!({"i": i, "j": j, "terms": poly_json(v)}))
        .collect();
    json!({"n": p.n(), "scalar": "hpoly", "phi": phi})
}

pub fn potential_json(pot: &Potential) -> Value {
    let terms: Vec<Value> = pot
        .terms()
        .map(|(cw, c)| json!({"word": word_json(cw.representative()), "coeff": hpoly_json(c)}))
        .collect();
    json!({"potential": {"n": pot.n(), "terms": terms}})
}

fn koszul_word_json(w: &[KoszulSymbol]) -> Value {
    Value::Array(
        w.iter()
            .map(|s| match *s {
                KoszulSymbol::X(i) => json!({"x": i}),
                KoszulSymbol::Xi2(i, j) => json!({"xi2": [i, j]}),
                KoszulSymbol::Xi3(i, j, k) => json!({"xi3": [i, j, k]}),
            })
            .collect(),
    )
}

pub fn koszul_json(p: &KoszulPoly) -> Value {
    Value::Array(
        p.terms()
            .map(|(w, c)| json!({"word": koszul_word_json(w), "coeff": hpoly_json(c)}))
            .collect(),
    )
}

pub fn certificate_json(r: &CertificateReport) -> Value {
    let residues: Vec<Value> = r
        .residues
        .iter()
        .map(|(&(i, j, k), v)| json!({"triple": [i, j, k], "residue": poly_json(v)}))
        .collect();
    json!({
        "verdict": r.verdict.to_string(),
        "d2": r.d2,
        "linear": r.linear,
        "conclusion": r.conclusion,
        "residues": residues,
    })
}

pub fn obstruction_json(r: &ObstructionReport) -> Value {
    let gens: Vec<Value> = r
        .generators
        .iter()
        .map(|g| {
            let (i, j, k) = g.triple;
            json!({"triple": [i, j, k], "poly": rpoly_json(&g.poly)})
        })
        .collect();
    json!({"hbar_order": r.hbar_order, "generators": gens})
}

pub fn tensor_check_json(r: &TensorCheck) -> Value {
    json!({
        "verdict": r.verdict.to_string(),
        "witness": r.witness.as_ref().map(|w| json!({"indices": w.indices, "value": w.value.to_string()})),
    })
}

pub fn degree_verdict_json(v: &DegreeVerdict) -> Value {
    match v {
        DegreeVerdict::Match => json!("match"),
        DegreeVerdict::Defect(d) => json!({"defect": d}),
        DegreeVerdict::Unknown => json!("unknown"),
    }
}

pub fn hilbert_json(r: &HilbertReport) -> Value {
    let mode = match &r.mode {
        Mode::At(a) => json!({"at": a.to_string()}),
        Mode::Generic => json!("generic"),
    };
    json!({
        "n": r.n,
        "mode": mode,
        "max_degree": r.max_degree,
        "dims": r.dims,
        "expected": r.expected,
        "verdicts": r.verdicts.iter().map(degree_verdict_json).collect::<Vec<_>>(),
        "overall": degree_verdict_json(&r.overall()),
        "first_defect": r.first_defect(),
        "complete_through": r.complete_through,
        "rule_count": r.rule_count,
        "excluded_points": r.excluded_points.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "excluded_factors": r.excluded_factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    })
}

pub fn torsion_json(r: &TorsionOutcome) -> Value {
    match r {
        TorsionOutcome::Witness(w) => json!({
            "outcome": "witness",
            "element": poly_json(&w.element),
            "factor": w.factor.to_string(),
            "degree_bound": w.degree_bound,
            "nonmember_at": w.nonmember_at.to_string(),
            "span_size": w.span_size,
        }),
        TorsionOutcome::Refuted(why) => json!({"outcome": "refuted", "reason": why}),
        TorsionOutcome::Unknown(why) => json!({"outcome": "unknown", "reason": why}),
    }
}
