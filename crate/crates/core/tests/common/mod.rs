#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use pbw_core::{HPoly, LieData, NCPoly, Potential, Presentation, QuadData, Rational, Scalar, Word};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn q(v: i64) -> Rational {
    Rational::from(v)
}

pub fn hp(s: &str) -> HPoly {
    s.parse().unwrap()
}

pub fn small_rational(r: &mut ChaCha8Rng) -> Rational {
    Rational::new(r.gen_range(-4i64..=4), r.gen_range(1i64..=3)).unwrap()
}

pub fn nonzero_rational(r: &mut ChaCha8Rng) -> Rational {
    loop {
        let v = small_rational(r);
        if !v.is_zero() {
            return v;
        }
    }
}

/// Point for specializations, avoiding 0 and ±1.
pub fn random_point(r: &mut ChaCha8Rng) -> Rational {
    loop {
        let v = Rational::new(r.gen_range(-9i64..=9), r.gen_range(1i64..=7)).unwrap();
        if !v.is_zero() && v != q(1) && v != q(-1) {
            return v;
        }
    }
}

/// `ħ·(c0 + c1 ħ)` with small rational `c0`, `c1`, nonzero.
pub fn hbar_coeff(r: &mut ChaCha8Rng) -> HPoly {
    loop {
        let c = HPoly::from_coeffs(vec![q(0), small_rational(r), if r.gen_bool(0.3) { small_rational(r) } else { q(0) }]);
        if !c.is_zero() {
            return c;
        }
    }
}

pub fn any_coeff(r: &mut ChaCha8Rng) -> HPoly {
    loop {
        let c = HPoly::from_coeffs((0..3).map(|_| small_rational(r)).collect());
        if !c.is_zero() {
            return c;
        }
    }
}

pub fn random_word(r: &mut ChaCha8Rng, n: usize, len: usize) -> Word {
    Word::from_indices((0..len).map(|_| r.gen_range(1..=n)))
}

/// Random potential with `terms` cycles of length in `1..=max_len`.
pub fn random_potential(r: &mut ChaCha8Rng, n: usize, max_len: usize, divisible: bool) -> Potential {
    let terms = r.gen_range(1..=4);
    let mut out = Vec::new();
    for _ in 0..terms {
        let len = r.gen_range(1..=max_len);
        let c = if divisible { hbar_coeff(r) } else { any_coeff(r) };
        out.push((random_word(r, n, len), c));
    }
    Potential::from_terms(n, out).unwrap()
}

/// Homogeneous cubic potential in three variables with `ħℚ` coefficients.
pub fn random_cubic_potential(r: &mut ChaCha8Rng) -> Potential {
    loop {
        let terms = r.gen_range(1..=4);
        let mut out = Vec::new();
        for _ in 0..terms {
            out.push((random_word(r, 3, 3), HPoly::monomial(1, nonzero_rational(r))));
        }
        let p = Potential::from_terms(3, out).unwrap();
        if !p.is_zero() {
            return p;
        }
    }
}

/// Structure constants from a dense table `c[i][j][k]` (1-based triples).
pub fn lie_from_table(n: usize, table: &[(usize, usize, usize, i64)]) -> LieData {
    let mut d = LieData::new(n);
    for &(i, j, k, v) in table {
        d.set(i, j, k, q(v)).unwrap();
    }
    d
}

/// Lie algebras (Jacobi holds) of dimension `n ≤ 4`.
pub fn lie_catalog(n: usize) -> Vec<LieData> {
    let mut out = vec![LieData::new(n)];
    if n >= 2 {
        out.push(lie_from_table(n, &[(1, 2, 1, 1)]));
    }
    if n >= 3 {
        out.push(lie_from_table(n, &[(1, 2, 3, 1), (3, 1, 1, 2), (3, 2, 2, -2)]));
        out.push(lie_from_table(n, &[(1, 2, 3, 1)]));
        out.push(lie_from_table(n, &[(1, 2, 3, 1), (2, 3, 1, 1), (3, 1, 2, 1)]));
        out.push(lie_from_table(n, &[(3, 1, 1, 1), (3, 2, 2, 2)]));
    }
    if n >= 4 {
        out.push(lie_from_table(n, &[(1, 2, 3, 1), (1, 3, 4, 1)]));
        out.push(lie_from_table(n, &[(1, 2, 2, 1), (3, 4, 4, 1)]));
    }
    out
}

type Matrix = Vec<Vec<Rational>>;

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect()
}

/// Random unimodular `P` with its inverse.
fn random_unimodular(r: &mut ChaCha8Rng, n: usize) -> (Matrix, Matrix) {
    let mut p = identity(n);
    let mut inv = identity(n);
    for _ in 0..r.gen_range(1..=5) {
        let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
        if a == b {
            continue;
        }
        let t = q(r.gen_range(-2i64..=2));
        // row_a += t·row_b on P; col_b −= t·col_a on inverse
        for c in 0..n {
            let v = p[b][c].clone() * &t;
            p[a][c] += &v;
        }
        for row in inv.iter_mut() {
            let v = row[a].clone() * &t;
            row[b] -= &v;
        }
    }
    (p, inv)
}

/// Structure constants in the basis `y_i = Σ_a P_ia x_a`.
pub fn change_basis(d: &LieData, r: &mut ChaCha8Rng) -> LieData {
    let n = d.n();
    let (p, inv) = random_unimodular(r, n);
    let mut out = LieData::new(n);
    for i in 1..=n {
        for j in i + 1..=n {
            for m in 1..=n {
                let mut s = q(0);
                for a in 1..=n {
                    for b in 1..=n {
                        for k in 1..=n {
                            let c = d.c(a, b, k);
                            if c.is_zero() {
                                continue;
                            }
                            s += &(p[i - 1][a - 1].clone() * &p[j - 1][b - 1] * &c * &inv[k - 1][m - 1]);
                        }
                    }
                }
                if !s.is_zero() {
                    out.set(i, j, m, s).unwrap();
                }
            }
        }
    }
    out
}

pub fn random_jacobi_lie(r: &mut ChaCha8Rng, n: usize) -> LieData {
    let cat = lie_catalog(n);
    let base = &cat[r.gen_range(0..cat.len())];
    let mut d = change_basis(base, r);
    if r.gen_bool(0.5) {
        let s = nonzero_rational(r);
        let mut scaled = LieData::new(n);
        for ((i, j, k), c) in d.entries() {
            scaled.set(i, j, k, c.clone() * &s).unwrap();
        }
        d = scaled;
    }
    d
}

pub fn random_sparse_lie(r: &mut ChaCha8Rng, n: usize) -> LieData {
    let mut d = LieData::new(n);
    for _ in 0..r.gen_range(1..=4) {
        let i = r.gen_range(1..=n);
        let j = r.gen_range(1..=n);
        if i == j {
            continue;
        }
        d.set(i, j, r.gen_range(1..=n), q(r.gen_range(-2i64..=2))).unwrap();
    }
    d
}

pub fn random_quad(r: &mut ChaCha8Rng, n: usize) -> QuadData {
    let mut d = QuadData::new(n);
    for _ in 0..r.gen_range(1..=4) {
        let i = r.gen_range(1..=n);
        let j = r.gen_range(1..=n);
        if i == j {
            continue;
        }
        d.set(i, j, r.gen_range(1..=n), r.gen_range(1..=n), q(r.gen_range(-2i64..=2))).unwrap();
    }
    d
}

/// Necklace derivative computed from scratch on every rotation of the stored
/// representatives: `Σ_{occurrences}` of the word read after the letter.
pub fn naive_derivative(pot: &Potential, i: usize) -> NCPoly<HPoly> {
    let n = pot.n();
    let mut out = NCPoly::zero(n);
    for (cw, c) in pot.terms() {
        let l = cw.representative().letters().to_vec();
        let len = l.len();
        for p in 0..len {
            if l[p] as usize == i {
                let rest: Vec<u8> = (1..len).map(|s| l[(p + s) % len]).collect();
                out.add_term(Word::from_slice(&rest), c);
            }
        }
    }
    out
}

/// `ħ²`-coefficient of the Jacobi defect, computed by rewriting
/// `Σ_cyc [φ_ij, x_k]` through `[x_a, x_b] = φ_ab`.
pub fn jacobi_defect(d: &LieData, i: usize, j: usize, k: usize) -> NCPoly<Rational> {
    let n = d.n();
    let p = Presentation::from_lie(d);
    let mut e = NCPoly::<HPoly>::zero(n);
    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
        e = &e + &p.phi(a, b).commutator(&NCPoly::var(n, c)).unwrap();
    }
    let mut out = NCPoly::<HPoly>::zero(n);
    for (w, c) in e.terms() {
        let l = w.letters();
        assert_eq!(l.len(), 2);
        let (a, b) = (l[0] as usize, l[1] as usize);
        if a < b {
            assert_eq!(e.coeff(&Word::from_slice(&[l[1], l[0]])), Some(&-c.clone()));
            out = &out + &p.phi(a, b).scale(c);
        } else {
            assert!(a != b, "diagonal term in a commutator sum");
        }
    }
    out.hbar_coefficient(2)
}

/// Brute-force expansion of
/// `Cycl Σ_{abcd} (α_jk^{ab} α_ia^{cd} x_c x_d x_b + α_jk^{ab} α_ib^{cd} x_a x_c x_d)`.
pub fn f5_bracket(d: &QuadData, i: usize, j: usize, k: usize) -> NCPoly<Rational> {
    let n = d.n();
    let mut out = NCPoly::zero(n);
    for (p, s, t) in [(i, j, k), (j, k, i), (k, i, j)] {
        for a in 1..=n {
            for b in 1..=n {
                let ab = d.alpha(s, t, a, b);
                if ab.is_zero() {
                    continue;
                }
                for c in 1..=n {
                    for e in 1..=n {
                        out.add_term(Word::from_indices([c, e, b]), &(ab.clone() * &d.alpha(p, a, c, e)));
                        out.add_term(Word::from_indices([a, c, e]), &(ab.clone() * &d.alpha(p, b, c, e)));
                    }
                }
            }
        }
    }
    out
}

pub fn all_words(n: usize, k: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w: Vec<u8>| {
                (1..=n as u8).map(move |l| {
                    let mut v = w.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(|v| Word::from_slice(&v)).collect()
}

/// `dim F_k/F_{k−1}` of `T(V)/I` at `ħ = a`, where `I` is truncated to the
/// span of `u·r·v` with x-degree at most `m`, by exact row reduction.
pub fn span_oracle_dims(p: &Presentation, a: &Rational, k_max: usize, m: usize) -> Vec<usize> {
    let n = p.n();
    let rels: Vec<NCPoly<Rational>> = p.relations().into_iter().map(|(_, r)| r.specialize(a)).collect();
    let mut words: Vec<Word> = (0..=m).flat_map(|k| all_words(n, k)).collect();
    words.sort();
    words.reverse();
    let col: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
    for r in &rels {
        let dr = match r.deg_x() {
            Ok(d) => d,
            Err(_) => continue,
        };
        if dr > m {
            continue;
        }
        let outer: Vec<Word> = (0..=m - dr).flat_map(|k| all_words(n, k)).collect();
        for u in &outer {
            for v in &outer {
                if u.len() + v.len() + dr > m {
                    continue;
                }
                let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
                for (w, c) in r.terms() {
                    let ww = w.wrap(u.letters(), v.letters());
                    let e = row.entry(col[&ww]).or_insert_with(Rational::zero);
                    *e += c;
                }
                row.retain(|_, c| !c.is_zero());
                loop {
                    let Some((&lead, lc)) = row.iter().next() else { break };
                    match pivots.get(&lead) {
                        Some(pr) => {
                            let f = lc.clone();
                            for (&cc, pv) in pr {
                                let e = row.entry(cc).or_insert_with(Rational::zero);
                                *e -= &(f.clone() * pv);
                            }
                            row.retain(|_, c| !c.is_zero());
                        }
                        None => {
                            let inv = pbw_core::FieldScalar::inv(lc).unwrap();
                            let normed = row.iter().map(|(&cc, v)| (cc, v.clone() * &inv)).collect();
                            pivots.insert(lead, normed);
                            break;
                        }
                    }
                }
            }
        }
    }
    let mut lead_by_degree = vec![0usize; m + 1];
    for &c in pivots.keys() {
        lead_by_degree[words[c].len()] += 1;
    }
    (0..=k_max).map(|k| n.pow(k as u32) - lead_by_degree[k]).collect()
}

/// Words of length `k` over `{1,2,3}` avoiding the bigrams `12`, `23`, `31`.
pub fn bigram_avoiding(k: usize) -> Vec<Word> {
    all_words(3, k)
        .into_iter()
        .filter(|w| {
            w.letters()
                .windows(2)
                .all(|p| !matches!((p[0], p[1]), (1, 2) | (2, 3) | (3, 1)))
        })
        .collect()
}

/// The strange potential `−ħ·Cycl(zyx)`.
pub fn strange() -> Presentation {
    Potential::from_terms(3, [(Word::from_slice(&[3, 2, 1]), hp("-h"))])
        .unwrap()
        .to_presentation()
        .unwrap()
}

/// Passes the Poisson condition but not the quadratic tensor condition.
pub fn poisson_only_fixture() -> QuadData {
    let mut d = QuadData::new(3);
    d.set(1, 2, 2, 3, q(-2)).unwrap();
    d.set(1, 3, 3, 3, q(1)).unwrap();
    d.set(2, 3, 1, 1, q(-1)).unwrap();
    d
}
