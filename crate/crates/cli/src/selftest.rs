//! Seeded randomized checks runnable from the command line.

use pbw_core::certify::{self, check_poisson, check_quadratic_condition, jacobiator, D2Choice};
use pbw_core::koszul::triples;
use pbw_core::rewrite::DegreeVerdict;
use pbw_core::{hilbert, HPoly, LieData, Mode, NCPoly, Potential, Presentation, QuadData, Rational, Scalar, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub samples: usize,
    pub detail: String,
}

impl Check {
    pub fn to_json(&self) -> Value {
        json!({"name": self.name, "passed": self.passed, "samples": self.samples, "detail": self.detail})
    }

    pub fn summary(&self) -> String {
        let v = if self.passed { "pass" } else { "FAIL" };
        if self.detail.is_empty() {
            format!("{v} ({} samples)", self.samples)
        } else {
            format!("{v} ({} samples) {}", self.samples, self.detail)
        }
    }
}

fn small(r: &mut ChaCha8Rng) -> Rational {
    Rational::new(r.gen_range(-3i64..=3), r.gen_range(1i64..=2)).expect("nonzero denominator")
}

fn word(r: &mut ChaCha8Rng, n: usize, len: usize) -> Word {
    Word::from_indices((0..len).map(|_| r.gen_range(1..=n)))
}

fn potential(r: &mut ChaCha8Rng, n: usize, max_len: usize) -> Potential {
    let mut pot = Potential::zero(n);
    for _ in 0..r.gen_range(1..=3) {
        let len = r.gen_range(1..=max_len);
        let w = word(r, n, len);
        let c = HPoly::from_coeffs(vec![Rational::zero(), small(r), small(r)]);
        pot.add_term(&w, &c).expect("letters in range");
    }
    pot
}

fn cyclic_cancellation(r: &mut ChaCha8Rng, samples: usize) -> Check {
    for s in 0..samples {
        let n = r.gen_range(1..=4);
        let pot = potential(r, n, 6);
        let mut sum = NCPoly::<HPoly>::zero(n);
        for i in 1..=n {
            let d = pot.derivative(i).expect("index in range");
            sum = &sum + &d.commutator(&NCPoly::var(n, i)).expect("same ambient");
        }
        if !sum.is_zero() {
            return Check {
                name: "cyclic cancellation",
                passed: false,
                samples: s + 1,
                detail: format!("{pot} leaves {sum}"),
            };
        }
    }
    Check { name: "cyclic cancellation", passed: true, samples, detail: String::new() }
}

fn lie_equivalence(r: &mut ChaCha8Rng, samples: usize) -> Check {
    let mut fails = 0;
    for s in 0..samples {
        let n = r.gen_range(3..=4);
        let mut d = LieData::new(n);
        for _ in 0..r.gen_range(1..=4) {
            let (i, j) = (r.gen_range(1..=n), r.gen_range(1..=n));
            if i != j {
                d.set(i, j, r.gen_range(1..=n), small(r)).expect("indices in range");
            }
        }
        let rep = certify::certify(&Presentation::from_lie(&d), &D2Choice::Lie).expect("lie path");
        let jacobi = triples(n).all(|(i, j, k)| jacobiator(&d, i, j, k).map(|v| v.is_zero()).unwrap_or(false));
        if rep.passed() != jacobi {
            return Check {
                name: "lie certificate vs jacobi",
                passed: false,
                samples: s + 1,
                detail: format!("certificate {} but jacobi {jacobi}", rep.verdict),
            };
        }
        fails += usize::from(!jacobi);
    }
    Check {
        name: "lie certificate vs jacobi",
        passed: true,
        samples,
        detail: format!("{fails} non-Lie samples"),
    }
}

fn quadratic_equivalence(r: &mut ChaCha8Rng, samples: usize) -> Check {
    let mut fails = 0;
    for s in 0..samples {
        let mut d = QuadData::new(3);
        for _ in 0..r.gen_range(1..=4) {
            let (i, j) = (r.gen_range(1..=3), r.gen_range(1..=3));
            if i != j {
                d.set(i, j, r.gen_range(1..=3), r.gen_range(1..=3), small(r)).expect("indices in range");
            }
        }
        let rep = certify::certify(&Presentation::from_quadratic(&d), &D2Choice::Quadratic).expect("quadratic path");
        let cond = check_quadratic_condition(&d).passed();
        let poisson_ok = !cond || check_poisson(&d).passed();
        if rep.passed() != cond || !poisson_ok {
            return Check {
                name: "quadratic certificate vs condition",
                passed: false,
                samples: s + 1,
                detail: format!("certificate {} condition {cond} poisson-implied {poisson_ok}", rep.verdict),
            };
        }
        fails += usize::from(!cond);
    }
    Check {
        name: "quadratic certificate vs condition",
        passed: true,
        samples,
        detail: format!("{fails} failing samples"),
    }
}

fn potential_pbw(r: &mut ChaCha8Rng, samples: usize) -> Check {
    let count = samples.div_ceil(10);
    for s in 0..count {
        let mut pot = Potential::zero(3);
        for _ in 0..r.gen_range(1..=3) {
            let w = word(r, 3, 3);
            pot.add_term(&w, &HPoly::monomial(1, small(r))).expect("letters in range");
        }
        let p = pot.to_presentation().expect("three variables");
        if !certify::certify(&p, &D2Choice::Default).expect("default path").passed() {
            return Check { name: "cubic potentials", passed: false, samples: s + 1, detail: format!("{pot} fails") };
        }
        let a = Rational::new(r.gen_range(2i64..=40), r.gen_range(1i64..=7)).expect("nonzero denominator");
        match hilbert(&p, &Mode::At(a.clone()), 3) {
            Ok(h) if h.overall() == DegreeVerdict::Match => {}
            Ok(h) => {
                return Check {
                    name: "cubic potentials",
                    passed: false,
                    samples: s + 1,
                    detail: format!("{pot} at h = {a}: dims {:?}", h.dims),
                }
            }
            Err(_) => {}
        }
    }
    Check { name: "cubic potentials", passed: true, samples: count, detail: String::new() }
}

pub fn run(seed: u64, samples: usize) -> Vec<Check> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    vec![
        cyclic_cancellation(&mut r, samples),
        lie_equivalence(&mut r, samples),
        quadratic_equivalence(&mut r, samples),
        potential_pbw(&mut r, samples),
    ]
}
