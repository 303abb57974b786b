mod oracle;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wisp_core::bench::{
    adjudicate, adjudicated_sets, auto_check, reliability, score, AnnotationSet, Answer, BenchError, Partition, Policy,
    UnitTestId, VerdictRecord,
};

use oracle::Frac;

fn set_from_seed(seed: u64) -> AnnotationSet {
    oracle::random_set(&mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn scores_equal_brute_force(seed in any::<u64>()) {
        let set = set_from_seed(seed);
        match (score(&set), oracle::scores(&set.records)) {
            (Ok(s), Some(o)) => {
                prop_assert_eq!(Frac::of(&s.macro_score), o.macro_score);
                prop_assert_eq!(Frac::of(&s.weighted), o.weighted);
                prop_assert_eq!(Frac::of(&s.composite), o.composite);
                prop_assert_eq!(Frac::of(&s.reliability), o.reliability);
                prop_assert_eq!(s.pure.as_ref().map(Frac::of), o.pure);
                prop_assert_eq!(&s.composite, &(&s.macro_score * &s.reliability));
            }
            (Err(BenchError::NoApplicableTests), None) => {}
            (got, want) => prop_assert!(false, "{:?} vs {:?}", got, want),
        }
    }

    #[test]
    fn scores_are_bounded(seed in any::<u64>()) {
        let set = set_from_seed(seed);
        let Ok(s) = score(&set) else { return Ok(()) };
        let (zero, hundred) = (BigRational::from_integer(BigInt::from(0)), BigRational::from_integer(BigInt::from(100)));
        for v in [Some(&s.macro_score), Some(&s.weighted), Some(&s.composite), s.pure.as_ref()].into_iter().flatten() {
            prop_assert!(*v >= zero && *v <= hundred);
        }
        let rates: Vec<BigRational> = s
            .tallies
            .values()
            .filter(|t| t.applicable > 0)
            .map(|t| BigRational::new(BigInt::from(t.passed * 100), BigInt::from(t.applicable)))
            .collect();
        prop_assert!(rates.iter().min().unwrap() <= &s.weighted && &s.weighted <= rates.iter().max().unwrap());
    }

    #[test]
    fn dropping_catastrophic_records_never_lowers_reliability(seed in any::<u64>()) {
        let set = set_from_seed(seed);
        let before = reliability(&set).unwrap();
        if let Some(i) = set.records.iter().position(|r| r.partition() == Partition::Catastrophic) {
            let mut records = set.records.clone();
            records.remove(i);
            if !records.is_empty() {
                prop_assert!(reliability(&AnnotationSet::new(records)).unwrap() >= before);
            }
        }
    }

    #[test]
    fn adjudication_ignores_order(seed in any::<u64>(), rot in 0usize..5, majority in any::<bool>()) {
        let policy = if majority { Policy::Majority } else { Policy::PreferFail };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut records: Vec<VerdictRecord> = (0..5)
            .map(|i| {
                let mut r = oracle::random_record(&mut rng, 0);
                r.annotator_id = format!("a{i}");
                r
            })
            .collect();
        let first = adjudicate(&records, policy).unwrap();
        records.rotate_left(rot);
        records.reverse();
        prop_assert_eq!(&adjudicate(&records, policy).unwrap(), &first);
        prop_assert_eq!(&adjudicate(std::slice::from_ref(&first), policy).unwrap(), &first);
        let sets = adjudicated_sets(&records, policy);
        prop_assert_eq!(&sets["m"].records, &vec![first]);
    }

    #[test]
    fn identical_text_never_fails(lines in prop::collection::vec("( {0,6}[a-z]{1,5}( {1,4}[a-z]{1,5}){0,3})?", 0..12)) {
        let truth = lines.join("\n");
        for t in UnitTestId::ALL {
            prop_assert_ne!(auto_check(t, &truth, &truth), Answer::Fail);
        }
    }
}

#[test]
fn worked_reliability_example() {
    let mk = |ocr: bool, pass: bool| VerdictRecord {
        poem_id: "p".into(),
        method_id: "m".into(),
        annotator_id: "a".into(),
        answers: BTreeMap::from([(UnitTestId::LbPresence, if pass { Answer::Pass } else { Answer::Fail })]),
        ocr_error: ocr,
    };
    let mut records = vec![mk(true, false), mk(true, false), mk(true, true), mk(true, true)];
    records.extend((0..4).map(|_| mk(false, true)));
    assert_eq!(Frac::of(&reliability(&AnnotationSet::new(records)).unwrap()), Frac(5, 8));
}
