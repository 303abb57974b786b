//! Automatic unit-test verdicts comparing a candidate text with the truth.

use std::collections::BTreeMap;

use super::{Answer, UnitTestId, VerdictRecord, WispType};
use crate::text;

pub const AUTO: &str = "auto";

/// Whitespace measurements of one text, in reading order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    /// (first word, last word) of each nonblank line.
    pub edges: Vec<(String, String)>,
    pub prefix: Vec<usize>,
    pub internal: Vec<usize>,
    /// Blank-line runs with text on both sides.
    pub vertical: Vec<usize>,
}

impl Profile {
    pub fn of(body: &str) -> Profile {
        let lines = text::lines(body);
        let mut p = Profile { edges: Vec::new(), prefix: Vec::new(), internal: Vec::new(), vertical: Vec::new() };
        for l in lines.iter().filter(|l| !text::is_blank(l)) {
            let w = text::words(l);
            p.edges.push((w[0].to_string(), w[w.len() - 1].to_string()));
            let lead = text::leading_spaces(l);
            if lead > 0 {
                p.prefix.push(lead);
            }
            p.internal.extend(text::internal_runs(l, 2).iter().map(|r| r.len()));
        }
        p.vertical = text::interior_blank_runs(&lines).into_iter().map(|(_, n)| n).collect();
        p
    }

    fn magnitudes(&self, w: WispType) -> &[usize] {
        match w {
            WispType::Prefix => &self.prefix,
            WispType::Internal => &self.internal,
            WispType::Vertical => &self.vertical,
            WispType::LineBreaks => &[],
        }
    }
}

fn same_weak_order(a: &[usize], b: &[usize]) -> bool {
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i].cmp(&a[j]) == b[i].cmp(&b[j])))
}

fn tolerance(w: WispType) -> usize {
    match w {
        WispType::Vertical => 0,
        _ => 1,
    }
}

fn check_profiles(test: UnitTestId, truth: &Profile, cand: &Profile) -> Answer {
    let verdict = |ok: bool| if ok { Answer::Pass } else { Answer::Fail };
    let w = test.wisp_type();
    if w == WispType::LineBreaks {
        if truth.edges.len() < 2 {
            return Answer::NotApplicable;
        }
        return verdict(truth.edges == cand.edges);
    }
    let (t, c) = (truth.magnitudes(w), cand.magnitudes(w));
    if t.is_empty() {
        return Answer::NotApplicable;
    }
    match test.tier() {
        super::Tier::Presence => verdict(!c.is_empty()),
        super::Tier::Fuzzy if t.len() <= 1 => Answer::NotApplicable,
        super::Tier::Fuzzy => verdict(t.len() == c.len() && same_weak_order(t, c)),
        super::Tier::Exact => {
            let tol = tolerance(w);
            verdict(t.len() == c.len() && t.iter().zip(c).all(|(&a, &b)| a.abs_diff(b) <= tol))
        }
    }
}

pub fn auto_check(test: UnitTestId, truth: &str, candidate: &str) -> Answer {
    check_profiles(test, &Profile::of(truth), &Profile::of(candidate))
}

pub fn auto_ocr_error(truth: &str, candidate: &str) -> bool {
    text::visible_chars(truth).ne(text::visible_chars(candidate))
}

/// Tests that are not automatically not-applicable for this truth text.
pub fn applicable_tests(truth: &str) -> Vec<UnitTestId> {
    let p = Profile::of(truth);
    UnitTestId::ALL
        .into_iter()
        .filter(|&t| check_profiles(t, &p, &p) != Answer::NotApplicable)
        .collect()
}

pub fn auto_verdict(poem_id: &str, method_id: &str, truth: &str, candidate: &str) -> VerdictRecord {
    let (t, c) = (Profile::of(truth), Profile::of(candidate));
    let answers: BTreeMap<UnitTestId, Answer> =
        UnitTestId::ALL.iter().map(|&u| (u, check_profiles(u, &t, &c))).collect();
    VerdictRecord {
        poem_id: poem_id.to_string(),
        method_id: method_id.to_string(),
        annotator_id: AUTO.to_string(),
        answers,
        ocr_error: auto_ocr_error(truth, candidate),
    }
}
