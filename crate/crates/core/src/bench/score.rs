//! Aggregate scores in exact rational arithmetic. Percentages are in [0, 100].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{AnnotationSet, Answer, BenchError, Partition, UnitTestId, WispType};

fn ratio(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn hundred() -> BigRational {
    BigRational::from_integer(BigInt::from(100))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TestTally {
    /// |A_u|: records with a pass or fail answer.
    pub applicable: usize,
    /// |T_u|: records that pass.
    pub passed: usize,
    pub pure_applicable: usize,
    pub pure_passed: usize,
}

pub fn tallies(set: &AnnotationSet) -> BTreeMap<UnitTestId, TestTally> {
    let mut out: BTreeMap<UnitTestId, TestTally> = UnitTestId::ALL.iter().map(|&t| (t, TestTally::default())).collect();
    for r in &set.records {
        let pure = r.partition() == Partition::Pure;
        for t in UnitTestId::ALL {
            let a = r.answer(t);
            if a == Answer::NotApplicable {
                continue;
            }
            let tally = out.get_mut(&t).expect("all tests present");
            tally.applicable += 1;
            tally.passed += usize::from(a == Answer::Pass);
            if pure {
                tally.pure_applicable += 1;
                tally.pure_passed += usize::from(a == Answer::Pass);
            }
        }
    }
    out
}

pub fn reliability(set: &AnnotationSet) -> Result<BigRational, BenchError> {
    if set.is_empty() {
        return Err(BenchError::EmptySet);
    }
    let n = set.len();
    let c = ratio(set.count(Partition::Catastrophic), n);
    let m = ratio(set.count(Partition::Mixed), n);
    Ok(BigRational::one() - (c + m / BigInt::from(2)))
}

fn applicable_tests(set: &AnnotationSet) -> Result<Vec<(UnitTestId, TestTally)>, BenchError> {
    if set.is_empty() {
        return Err(BenchError::EmptySet);
    }
    let used: Vec<_> = tallies(set).into_iter().filter(|(_, t)| t.applicable > 0).collect();
    if used.is_empty() {
        return Err(BenchError::NoApplicableTests);
    }
    Ok(used)
}

fn mean(xs: impl Iterator<Item = BigRational>) -> Option<BigRational> {
    let (sum, n) = xs.fold((BigRational::zero(), 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / BigInt::from(n))
}

/// Mean over tests of |T_u| / |A_u|, as a percentage.
pub fn macro_score(set: &AnnotationSet) -> Result<BigRational, BenchError> {
    let used = applicable_tests(set)?;
    let m = mean(used.iter().map(|(_, t)| ratio(t.passed, t.applicable))).expect("nonempty");
    Ok(m * hundred())
}

/// Σ|T_u| / Σ|A_u|, as a percentage.
pub fn weighted_score(set: &AnnotationSet) -> Result<BigRational, BenchError> {
    let used = applicable_tests(set)?;
    let passed: usize = used.iter().map(|(_, t)| t.passed).sum();
    let applicable: usize = used.iter().map(|(_, t)| t.applicable).sum();
    Ok(ratio(passed, applicable) * hundred())
}

pub fn composite_score(set: &AnnotationSet) -> Result<BigRational, BenchError> {
    Ok(macro_score(set)? * reliability(set)?)
}

/// Macro score over the pure partition only; `None` when no pure record
/// answers any test.
pub fn pure_score(set: &AnnotationSet) -> Result<Option<BigRational>, BenchError> {
    let used = applicable_tests(set)?;
    Ok(mean(
        used.iter()
            .filter(|(_, t)| t.pure_applicable > 0)
            .map(|(_, t)| ratio(t.pure_passed, t.pure_applicable)),
    )
    .map(|m| m * hundred()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scores {
    pub macro_score: BigRational,
    pub weighted: BigRational,
    pub composite: BigRational,
    pub pure: Option<BigRational>,
    pub reliability: BigRational,
    pub ocr_error_rate: BigRational,
    /// Σ|T_u| / Σ|A_u| over the type's tests; `None` when nothing applies.
    pub type_rates: BTreeMap<WispType, Option<BigRational>>,
    pub tallies: BTreeMap<UnitTestId, TestTally>,
    /// Tests left out of the means for lack of applicable answers.
    pub dropped: Vec<UnitTestId>,
    pub records: usize,
}

pub fn score(set: &AnnotationSet) -> Result<Scores, BenchError> {
    let tallies = tallies(set);
    let dropped: Vec<UnitTestId> = tallies.iter().filter(|(_, t)| t.applicable == 0).map(|(&u, _)| u).collect();
    for u in &dropped {
        log::warn!("unit test {u} has no applicable annotations; dropped from scores");
    }
    let macro_score = macro_score(set)?;
    let reliability = reliability(set)?;
    let type_rates = WispType::ALL
        .iter()
        .map(|&w| {
            let (p, a) = tallies
                .iter()
                .filter(|(u, _)| u.wisp_type() == w)
                .fold((0, 0), |(p, a), (_, t)| (p + t.passed, a + t.applicable));
            (w, (a > 0).then(|| ratio(p, a) * hundred()))
        })
        .collect();
    let flagged = set.records.iter().filter(|r| r.ocr_error).count();
    Ok(Scores {
        composite: macro_score.clone() * reliability.clone(),
        weighted: weighted_score(set)?,
        pure: pure_score(set)?,
        macro_score,
        reliability,
        ocr_error_rate: ratio(flagged, set.len()) * hundred(),
        type_rates,
        tallies,
        dropped,
        records: set.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::VerdictRecord;

    fn rec(answers: &[(UnitTestId, Answer)], ocr: bool) -> VerdictRecord {
        VerdictRecord {
            poem_id: "p".into(),
            method_id: "m".into(),
            annotator_id: "a".into(),
            answers: answers.iter().copied().collect(),
            ocr_error: ocr,
        }
    }

    #[test]
    fn reliability_cases() {
        use Answer::*;
        let t = UnitTestId::LbPresence;
        let mut records = vec![rec(&[(t, Fail)], true), rec(&[(t, Fail)], true)];
        records.extend([rec(&[(t, Pass)], true), rec(&[(t, Pass)], true)]);
        records.extend((0..4).map(|_| rec(&[(t, Pass)], false)));
        let set = AnnotationSet::new(records);
        assert_eq!(reliability(&set).unwrap(), ratio(5, 8));
        let clean = AnnotationSet::new(vec![rec(&[(t, Pass)], false)]);
        assert_eq!(reliability(&clean).unwrap(), BigRational::one());
        let doomed = AnnotationSet::new(vec![rec(&[(t, Fail)], true); 3]);
        assert_eq!(reliability(&doomed).unwrap(), BigRational::zero());
        assert_eq!(reliability(&AnnotationSet::default()), Err(BenchError::EmptySet));
    }

    #[test]
    fn symmetric_macro_and_weighted() {
        use Answer::*;
        let (a, b) = (UnitTestId::LbPresence, UnitTestId::PrefixPresence);
        let set = AnnotationSet::new((0..4).map(|_| rec(&[(a, Pass), (b, Fail)], false)).collect());
        assert_eq!(macro_score(&set).unwrap(), ratio(50, 1));
        assert_eq!(weighted_score(&set).unwrap(), ratio(50, 1));
    }

    #[test]
    fn all_na_is_an_error() {
        let set = AnnotationSet::new(vec![rec(&[], false)]);
        assert_eq!(macro_score(&set), Err(BenchError::NoApplicableTests));
    }

    #[test]
    fn missing_type_has_no_rate() {
        let set = AnnotationSet::new(vec![rec(&[(UnitTestId::LbPresence, Answer::Pass)], false)]);
        let s = score(&set).unwrap();
        assert_eq!(s.type_rates[&WispType::Internal], None);
        assert_eq!(s.type_rates[&WispType::LineBreaks], Some(hundred()));
        assert_eq!(s.dropped.len(), 9);
    }
}
