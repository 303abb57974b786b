//! Bench unit tests, verdict adjudication and aggregate scores.

mod check;
mod report;
mod score;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use check::{applicable_tests, auto_check, auto_ocr_error, auto_verdict, Profile};
pub use report::{bench_report, fmt2, report_from_verdicts, BenchReport, Column, ReportRow};
pub use score::{
    composite_score, macro_score, pure_score, reliability, score, tallies, weighted_score, Scores, TestTally,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Presence,
    Fuzzy,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WispType {
    Prefix,
    Internal,
    LineBreaks,
    Vertical,
}

impl WispType {
    pub const ALL: [WispType; 4] = [WispType::Prefix, WispType::Internal, WispType::LineBreaks, WispType::Vertical];

    pub fn as_str(self) -> &'static str {
        match self {
            WispType::Prefix => "PREFIX",
            WispType::Internal => "INTERNAL",
            WispType::LineBreaks => "LINE_BREAKS",
            WispType::Vertical => "VERTICAL",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UnitTestId {
    LbPresence,
    PrefixPresence,
    PrefixFuzzy,
    PrefixExact,
    InternalPresence,
    InternalFuzzy,
    InternalExact,
    VerticalPresence,
    VerticalFuzzy,
    VerticalExact,
}

impl UnitTestId {
    pub const ALL: [UnitTestId; 10] = [
        UnitTestId::LbPresence,
        UnitTestId::PrefixPresence,
        UnitTestId::PrefixFuzzy,
        UnitTestId::PrefixExact,
        UnitTestId::InternalPresence,
        UnitTestId::InternalFuzzy,
        UnitTestId::InternalExact,
        UnitTestId::VerticalPresence,
        UnitTestId::VerticalFuzzy,
        UnitTestId::VerticalExact,
    ];

    pub fn code(self) -> &'static str {
        use UnitTestId::*;
        match self {
            LbPresence => "1",
            PrefixPresence => "2a",
            PrefixFuzzy => "2b",
            PrefixExact => "2c",
            InternalPresence => "3a",
            InternalFuzzy => "3b",
            InternalExact => "3c",
            VerticalPresence => "4a",
            VerticalFuzzy => "4b",
            VerticalExact => "4c",
        }
    }

    pub fn as_str(self) -> &'static str {
        use UnitTestId::*;
        match self {
            LbPresence => "LB_PRESENCE",
            PrefixPresence => "PREFIX_PRESENCE",
            PrefixFuzzy => "PREFIX_FUZZY",
            PrefixExact => "PREFIX_EXACT",
            InternalPresence => "INTERNAL_PRESENCE",
            InternalFuzzy => "INTERNAL_FUZZY",
            InternalExact => "INTERNAL_EXACT",
            VerticalPresence => "VERTICAL_PRESENCE",
            VerticalFuzzy => "VERTICAL_FUZZY",
            VerticalExact => "VERTICAL_EXACT",
        }
    }

    pub fn tier(self) -> Tier {
        use UnitTestId::*;
        match self {
            LbPresence | PrefixPresence | InternalPresence | VerticalPresence => Tier::Presence,
            PrefixFuzzy | InternalFuzzy | VerticalFuzzy => Tier::Fuzzy,
            PrefixExact | InternalExact | VerticalExact => Tier::Exact,
        }
    }

    pub fn wisp_type(self) -> WispType {
        use UnitTestId::*;
        match self {
            LbPresence => WispType::LineBreaks,
            PrefixPresence | PrefixFuzzy | PrefixExact => WispType::Prefix,
            InternalPresence | InternalFuzzy | InternalExact => WispType::Internal,
            VerticalPresence | VerticalFuzzy | VerticalExact => WispType::Vertical,
        }
    }

    /// Question put to human reviewers.
    pub fn question(self) -> &'static str {
        use UnitTestId::*;
        match self {
            LbPresence => "Does every line start and end with the same words as the original?",
            PrefixPresence => "Is leading whitespace present where the original indents a line?",
            PrefixFuzzy => "Do the indented lines keep the original's relative depths?",
            PrefixExact => "Does each indent match the original to within one space?",
            InternalPresence => "Is extra spacing present inside lines where the original has it?",
            InternalFuzzy => "Do the internal gaps keep the original's relative widths?",
            InternalExact => "Does each internal gap match the original to within one space?",
            VerticalPresence => "Is there a blank line where the original separates lines vertically?",
            VerticalFuzzy => "Do the vertical gaps keep the original's relative sizes?",
            VerticalExact => "Does each vertical gap have exactly the original's number of blank lines?",
        }
    }
}

impl fmt::Display for UnitTestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UnitTestId {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        UnitTestId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s) || t.code() == s)
            .ok_or_else(|| BenchError::UnknownTest(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub poem_id: String,
    pub method_id: String,
    pub annotator_id: String,
    pub answers: BTreeMap<UnitTestId, Answer>,
    #[serde(default)]
    pub ocr_error: bool,
}

impl VerdictRecord {
    /// Missing answers read as not applicable.
    pub fn answer(&self, t: UnitTestId) -> Answer {
        self.answers.get(&t).copied().unwrap_or(Answer::NotApplicable)
    }

    pub fn passes(&self) -> usize {
        self.answers.values().filter(|&&a| a == Answer::Pass).count()
    }

    pub fn applicable(&self) -> usize {
        self.answers.values().filter(|&&a| a != Answer::NotApplicable).count()
    }

    pub fn partition(&self) -> Partition {
        match (self.ocr_error, self.passes()) {
            (false, _) => Partition::Pure,
            (true, 0) => Partition::Catastrophic,
            (true, _) => Partition::Mixed,
        }
    }

    pub fn pair(&self) -> (&str, &str) {
        (&self.poem_id, &self.method_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    Catastrophic,
    Mixed,
    Pure,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub records: Vec<VerdictRecord>,
}

impl AnnotationSet {
    pub fn new(records: Vec<VerdictRecord>) -> Self {
        AnnotationSet { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, p: Partition) -> usize {
        self.records.iter().filter(|r| r.partition() == p).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BenchError {
    #[error("annotation set is empty")]
    EmptySet,
    #[error("no unit test has an applicable annotation")]
    NoApplicableTests,
    #[error("no verdict records to adjudicate")]
    NoRecords,
    #[error("unknown unit test {0:?}")]
    UnknownTest(String),
    #[error("unknown adjudication policy {0:?}")]
    UnknownPolicy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Any fail wins; pass needs every applicable answer to pass.
    #[default]
    PreferFail,
    /// More passes than fails wins; ties go to fail.
    Majority,
}

impl FromStr for Policy {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "prefer-fail" | "prefer_fail" => Ok(Policy::PreferFail),
            "majority" => Ok(Policy::Majority),
            other => Err(BenchError::UnknownPolicy(other.to_string())),
        }
    }
}

pub const ADJUDICATED: &str = "adjudicated";

/// Resolves several annotators' records for one (poem, method) pair.
pub fn adjudicate(records: &[VerdictRecord], policy: Policy) -> Result<VerdictRecord, BenchError> {
    let first = records.first().ok_or(BenchError::NoRecords)?;
    let mut answers = BTreeMap::new();
    for t in UnitTestId::ALL {
        let pass = records.iter().filter(|r| r.answer(t) == Answer::Pass).count();
        let fail = records.iter().filter(|r| r.answer(t) == Answer::Fail).count();
        let a = match (pass, fail) {
            (0, 0) => Answer::NotApplicable,
            _ => match policy {
                Policy::PreferFail if fail > 0 => Answer::Fail,
                Policy::PreferFail => Answer::Pass,
                Policy::Majority if pass > fail => Answer::Pass,
                Policy::Majority => Answer::Fail,
            },
        };
        if a != Answer::NotApplicable || records.iter().any(|r| r.answers.contains_key(&t)) {
            answers.insert(t, a);
        }
    }
    let flagged = records.iter().filter(|r| r.ocr_error).count();
    let ocr_error = match policy {
        Policy::PreferFail => flagged > 0,
        Policy::Majority => 2 * flagged >= records.len() && flagged > 0,
    };
    Ok(VerdictRecord {
        poem_id: first.poem_id.clone(),
        method_id: first.method_id.clone(),
        annotator_id: ADJUDICATED.to_string(),
        answers,
        ocr_error,
    })
}

/// Keeps each annotator's last record per (poem, method), ordered by key.
pub fn latest_by_annotator(records: impl IntoIterator<Item = VerdictRecord>) -> Vec<VerdictRecord> {
    let mut latest: BTreeMap<(String, String, String), VerdictRecord> = BTreeMap::new();
    for r in records {
        latest.insert((r.method_id.clone(), r.poem_id.clone(), r.annotator_id.clone()), r);
    }
    latest.into_values().collect()
}

/// Replays raw verdicts into one adjudicated set per method.
pub fn adjudicated_sets(records: &[VerdictRecord], policy: Policy) -> BTreeMap<String, AnnotationSet> {
    let mut pairs: BTreeMap<(String, String), Vec<VerdictRecord>> = BTreeMap::new();
    for r in latest_by_annotator(records.iter().cloned()) {
        pairs.entry((r.method_id.clone(), r.poem_id.clone())).or_default().push(r);
    }
    let mut sets: BTreeMap<String, AnnotationSet> = BTreeMap::new();
    for ((method, _), rs) in pairs {
        let resolved = adjudicate(&rs, policy).expect("pairs are nonempty");
        sets.entry(method).or_default().records.push(resolved);
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(annotator: &str, answers: &[(UnitTestId, Answer)], ocr: bool) -> VerdictRecord {
        VerdictRecord {
            poem_id: "p".into(),
            method_id: "m".into(),
            annotator_id: annotator.into(),
            answers: answers.iter().copied().collect(),
            ocr_error: ocr,
        }
    }

    #[test]
    fn tier_and_type_table() {
        use UnitTestId::*;
        assert_eq!(PrefixFuzzy.tier(), Tier::Fuzzy);
        assert_eq!(VerticalExact.wisp_type(), WispType::Vertical);
        assert_eq!(LbPresence.wisp_type(), WispType::LineBreaks);
        assert_eq!("2c".parse::<UnitTestId>(), Ok(PrefixExact));
        assert_eq!(UnitTestId::ALL.iter().filter(|t| t.tier() == Tier::Presence).count(), 4);
    }

    #[test]
    fn prefer_fail_policy_table() {
        use Answer::*;
        let t = UnitTestId::PrefixExact;
        let cases = [
            ((Pass, Fail), Fail),
            ((Fail, Pass), Fail),
            ((Pass, Pass), Pass),
            ((Pass, NotApplicable), Pass),
            ((NotApplicable, Fail), Fail),
            ((NotApplicable, NotApplicable), NotApplicable),
        ];
        for ((a, b), want) in cases {
            let r = adjudicate(&[rec("x", &[(t, a)], false), rec("y", &[(t, b)], false)], Policy::PreferFail).unwrap();
            assert_eq!(r.answer(t), want, "{a:?},{b:?}");
            assert_eq!(r.annotator_id, ADJUDICATED);
        }
    }

    #[test]
    fn ocr_flag_is_sticky() {
        let r = adjudicate(&[rec("x", &[], false), rec("y", &[], true)], Policy::PreferFail).unwrap();
        assert!(r.ocr_error);
    }

    #[test]
    fn majority_ties_fail() {
        use Answer::*;
        let t = UnitTestId::LbPresence;
        let r = adjudicate(&[rec("x", &[(t, Pass)], false), rec("y", &[(t, Fail)], false)], Policy::Majority).unwrap();
        assert_eq!(r.answer(t), Fail);
        let r = adjudicate(
            &[rec("x", &[(t, Pass)], false), rec("y", &[(t, Fail)], false), rec("z", &[(t, Pass)], false)],
            Policy::Majority,
        )
        .unwrap();
        assert_eq!(r.answer(t), Pass);
    }

    #[test]
    fn partitions() {
        use Answer::*;
        let t = UnitTestId::LbPresence;
        assert_eq!(rec("a", &[(t, Fail)], true).partition(), Partition::Catastrophic);
        assert_eq!(rec("a", &[(t, Pass)], true).partition(), Partition::Mixed);
        assert_eq!(rec("a", &[(t, Fail)], false).partition(), Partition::Pure);
    }

    #[test]
    fn resubmission_replaces() {
        use Answer::*;
        let t = UnitTestId::LbPresence;
        let log = vec![rec("x", &[(t, Fail)], false), rec("x", &[(t, Pass)], false)];
        let sets = adjudicated_sets(&log, Policy::PreferFail);
        assert_eq!(sets["m"].records.len(), 1);
        assert_eq!(sets["m"].records[0].answer(t), Pass);
    }

    #[test]
    fn verdict_json_shape() {
        let r = rec("x", &[(UnitTestId::PrefixFuzzy, Answer::NotApplicable)], true);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"PREFIX_FUZZY\":\"not_applicable\""), "{json}");
        assert_eq!(serde_json::from_str::<VerdictRecord>(&json).unwrap(), r);
    }
}
