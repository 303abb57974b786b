//! Brute-force recomputation of bench scores straight from the records,
//! in reduced i128 fractions. Shared by the property tests and the
//! acceptance harness.

#![allow(dead_code)]

pub mod html;
pub mod stats;
pub mod triples;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use wisp_core::bench::{AnnotationSet, Answer, UnitTestId, VerdictRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac(pub i128, pub i128);

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

impl Frac {
    pub fn new(n: i128, d: i128) -> Frac {
        assert!(d != 0);
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Frac(s * n / g, s * d / g)
    }
    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    pub fn sub(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1 - o.0 * self.1, self.1 * o.1)
    }
    pub fn mul(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.0, self.1 * o.1)
    }
    pub fn of(r: &BigRational) -> Frac {
        let n: i128 = r.numer().try_into().unwrap();
        let d: i128 = r.denom().try_into().unwrap();
        Frac::new(n, d)
    }
    pub fn to_big(self) -> BigRational {
        BigRational::new(BigInt::from(self.0), BigInt::from(self.1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleScores {
    pub macro_score: Frac,
    pub weighted: Frac,
    pub composite: Frac,
    pub pure: Option<Frac>,
    pub reliability: Frac,
}

fn mean(xs: &[Frac]) -> Option<Frac> {
    if xs.is_empty() {
        return None;
    }
    let sum = xs.iter().fold(Frac(0, 1), |a, &b| a.add(b));
    Some(sum.mul(Frac::new(1, xs.len() as i128)))
}

/// `None` when no test has an applicable answer.
pub fn scores(records: &[VerdictRecord]) -> Option<OracleScores> {
    let hundred = Frac(100, 1);
    let mut rates = Vec::new();
    let mut pure_rates = Vec::new();
    let (mut passed, mut applicable) = (0i128, 0i128);
    for t in UnitTestId::ALL {
        let (mut a, mut p, mut pa, mut pp) = (0, 0, 0, 0);
        for r in records {
            let ans = r.answers.get(&t).copied().unwrap_or(Answer::NotApplicable);
            if ans == Answer::NotApplicable {
                continue;
            }
            a += 1;
            p += i128::from(ans == Answer::Pass);
            if !r.ocr_error {
                pa += 1;
                pp += i128::from(ans == Answer::Pass);
            }
        }
        if a > 0 {
            rates.push(Frac::new(p, a));
            passed += p;
            applicable += a;
            if pa > 0 {
                pure_rates.push(Frac::new(pp, pa));
            }
        }
    }
    let macro_score = mean(&rates)?.mul(hundred);
    let n = records.len() as i128;
    let mut c = 0;
    let mut m = 0;
    for r in records.iter().filter(|r| r.ocr_error) {
        if r.answers.values().any(|&a| a == Answer::Pass) {
            m += 1;
        } else {
            c += 1;
        }
    }
    let reliability = Frac(1, 1).sub(Frac::new(2 * c + m, 2 * n));
    Some(OracleScores {
        macro_score,
        weighted: Frac::new(passed, applicable).mul(hundred),
        composite: macro_score.mul(reliability),
        pure: mean(&pure_rates).map(|f| f.mul(hundred)),
        reliability,
    })
}

pub fn random_record(rng: &mut impl Rng, poem: usize) -> VerdictRecord {
    let na = rng.gen_range(0.0..0.7);
    let pass = rng.gen_range(0.0..1.0);
    let answers = UnitTestId::ALL
        .iter()
        .filter_map(|&t| {
            let x: f64 = rng.gen();
            if x < na / 2.0 {
                None
            } else if x < na {
                Some((t, Answer::NotApplicable))
            } else if rng.gen_bool(pass) {
                Some((t, Answer::Pass))
            } else {
                Some((t, Answer::Fail))
            }
        })
        .collect();
    VerdictRecord {
        poem_id: format!("p{poem}"),
        method_id: "m".into(),
        annotator_id: "a".into(),
        answers,
        ocr_error: rng.gen_bool(0.3),
    }
}

pub fn random_set(rng: &mut impl Rng) -> AnnotationSet {
    let n = rng.gen_range(1..40);
    AnnotationSet::new((0..n).map(|i| random_record(rng, i)).collect())
}
