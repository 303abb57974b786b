//! In-memory task pool and verdict store. Pure logic; the HTTP layer owns
//! locking and the log.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use wisp_core::bench::{report_from_verdicts, Answer, BenchReport, Policy, UnitTestId, VerdictRecord};

use crate::manifest::TaskSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewTask {
    pub task_id: String,
    pub poem_id: String,
    pub method_id: String,
    pub image_ref: String,
    pub candidate_text: String,
    pub applicable_tests: Vec<UnitTestId>,
    pub assigned_to: Option<String>,
    /// Question text per applicable test, for display.
    pub questions: BTreeMap<UnitTestId, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskFilter {
    pub method: Option<String>,
    pub poem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Offense {
    pub test: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubmitError {
    #[error("no task for poem {poem} and method {method}")]
    UnknownTask { poem: String, method: String },
    #[error("annotator_id must not be empty")]
    NoAnnotator,
    #[error("answers do not match the applicable tests")]
    Invalid(Vec<Offense>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmitAck {
    pub task_id: String,
    pub poem_id: String,
    pub method_id: String,
    pub annotator_id: String,
    pub replaced: bool,
    /// Verdicts now on record for this pair.
    pub verdicts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodProgress {
    pub method_id: String,
    pub pairs: usize,
    pub unjudged: usize,
    pub single: usize,
    pub double: usize,
    /// Set while any pair has fewer than two verdicts.
    pub provisional: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub annotators: Vec<String>,
    pub verdicts: usize,
    pub methods: Vec<MethodProgress>,
    /// Live adjudicated scores; absent until something is scorable.
    pub report: Option<BenchReport>,
}

type VerdictKey = (String, String, String);

pub struct Pool {
    tasks: Vec<TaskSpec>,
    by_id: HashMap<String, usize>,
    by_pair: HashMap<(String, String), usize>,
    /// (method, poem, annotator) to that annotator's latest record.
    verdicts: BTreeMap<VerdictKey, VerdictRecord>,
    leases: HashMap<(usize, String), Instant>,
    annotators: BTreeSet<String>,
    lease: Duration,
    policy: Policy,
}

impl Pool {
    pub fn new(tasks: Vec<TaskSpec>, lease: Duration, policy: Policy) -> Pool {
        let by_id = tasks.iter().enumerate().map(|(i, t)| (t.task_id.clone(), i)).collect();
        let by_pair = tasks.iter().enumerate().map(|(i, t)| ((t.poem_id.clone(), t.method_id.clone()), i)).collect();
        Pool {
            tasks,
            by_id,
            by_pair,
            verdicts: BTreeMap::new(),
            leases: HashMap::new(),
            annotators: BTreeSet::new(),
            lease,
            policy,
        }
    }

    /// Replays logged records in order; later ones replace earlier ones.
    pub fn replay(&mut self, records: impl IntoIterator<Item = VerdictRecord>) {
        for r in records {
            if !self.by_pair.contains_key(&(r.poem_id.clone(), r.method_id.clone())) {
                log::warn!("log has a verdict for {}/{} which is not in the manifest", r.poem_id, r.method_id);
            }
            self.annotators.insert(r.annotator_id.clone());
            self.verdicts.insert(key(&r), r);
        }
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.tasks
    }

    /// Each annotator's latest record per pair, ordered by key.
    pub fn records(&self) -> Vec<VerdictRecord> {
        self.verdicts.values().cloned().collect()
    }

    pub fn verdict_count(&self) -> usize {
        self.verdicts.len()
    }

    pub fn annotators(&self) -> &BTreeSet<String> {
        &self.annotators
    }

    fn pair_verdicts(&self, t: &TaskSpec) -> usize {
        let lo = (t.method_id.clone(), t.poem_id.clone(), String::new());
        self.verdicts.range(lo..).take_while(|((m, p, _), _)| *m == t.method_id && *p == t.poem_id).count()
    }

    fn judged(&self, t: &TaskSpec, annotator: &str) -> bool {
        self.verdicts.contains_key(&(t.method_id.clone(), t.poem_id.clone(), annotator.to_string()))
    }

    fn view(&self, i: usize, assigned_to: Option<String>) -> ReviewTask {
        let t = &self.tasks[i];
        ReviewTask {
            task_id: t.task_id.clone(),
            poem_id: t.poem_id.clone(),
            method_id: t.method_id.clone(),
            image_ref: format!("/poems/{}/image", t.poem_id),
            candidate_text: t.candidate_text.clone(),
            applicable_tests: t.applicable_tests.clone(),
            assigned_to,
            questions: t.applicable_tests.iter().map(|&u| (u, u.question().to_string())).collect(),
        }
    }

    /// Looks a task up; `assigned_to` is filled when `annotator` holds its lease.
    pub fn task(&self, task_id: &str, annotator: Option<&str>, now: Instant) -> Option<ReviewTask> {
        let &i = self.by_id.get(task_id)?;
        let holder = annotator.filter(|a| self.leases.get(&(i, a.to_string())).is_some_and(|&exp| exp > now));
        Some(self.view(i, holder.map(str::to_string)))
    }

    /// Hands out the least-covered task this annotator has neither judged nor
    /// currently holds. Coverage counts verdicts plus other annotators' live
    /// leases; ties go to manifest order. The returned task is leased.
    pub fn next_task(&mut self, annotator: &str, filter: &TaskFilter, now: Instant) -> Option<ReviewTask> {
        self.leases.retain(|_, exp| *exp > now);
        self.annotators.insert(annotator.to_string());
        let mut leased: HashMap<usize, usize> = HashMap::new();
        for (i, a) in self.leases.keys() {
            if a != annotator {
                *leased.entry(*i).or_default() += 1;
            }
        }
        let pick = self
            .tasks
            .iter()
            .enumerate()
            .filter(|(_, t)| filter.method.as_ref().is_none_or(|m| *m == t.method_id))
            .filter(|(_, t)| filter.poem.as_ref().is_none_or(|p| *p == t.poem_id))
            .filter(|(i, t)| !self.judged(t, annotator) && !self.leases.contains_key(&(*i, annotator.to_string())))
            .min_by_key(|(i, t)| (self.pair_verdicts(t) + leased.get(i).copied().unwrap_or(0), *i))
            .map(|(i, _)| i)?;
        self.leases.insert((pick, annotator.to_string()), now + self.lease);
        Some(self.view(pick, Some(annotator.to_string())))
    }

    /// Checks a submission and returns the record as it will be stored:
    /// answers restricted to the task's applicable tests.
    pub fn validate(&self, r: &VerdictRecord) -> Result<VerdictRecord, SubmitError> {
        let &i = self
            .by_pair
            .get(&(r.poem_id.clone(), r.method_id.clone()))
            .ok_or_else(|| SubmitError::UnknownTask { poem: r.poem_id.clone(), method: r.method_id.clone() })?;
        if r.annotator_id.trim().is_empty() {
            return Err(SubmitError::NoAnnotator);
        }
        let applicable = &self.tasks[i].applicable_tests;
        let mut bad = Vec::new();
        for &t in applicable {
            match r.answers.get(&t) {
                Some(Answer::Pass | Answer::Fail) => {}
                Some(Answer::NotApplicable) => bad.push(offense(t, "applicable test answered not_applicable")),
                None => bad.push(offense(t, "missing answer")),
            }
        }
        for (&t, &a) in &r.answers {
            if !applicable.contains(&t) && a != Answer::NotApplicable {
                bad.push(offense(t, "test is not applicable to this poem"));
            }
        }
        if !bad.is_empty() {
            bad.sort_by(|a, b| a.test.cmp(&b.test));
            return Err(SubmitError::Invalid(bad));
        }
        let mut stored = r.clone();
        stored.answers.retain(|t, _| applicable.contains(t));
        Ok(stored)
    }

    /// Stores an already validated record, replacing the annotator's earlier
    /// one for the pair, and releases the annotator's lease on it.
    pub fn apply(&mut self, r: VerdictRecord) -> SubmitAck {
        let i = self.by_pair[&(r.poem_id.clone(), r.method_id.clone())];
        self.leases.remove(&(i, r.annotator_id.clone()));
        self.annotators.insert(r.annotator_id.clone());
        let ack_base = (r.poem_id.clone(), r.method_id.clone(), r.annotator_id.clone());
        let replaced = self.verdicts.insert(key(&r), r).is_some();
        SubmitAck {
            task_id: self.tasks[i].task_id.clone(),
            poem_id: ack_base.0,
            method_id: ack_base.1,
            annotator_id: ack_base.2,
            replaced,
            verdicts: self.pair_verdicts(&self.tasks[i]),
        }
    }

    pub fn progress(&self, method: Option<&str>) -> Progress {
        let mut methods: BTreeMap<&str, MethodProgress> = BTreeMap::new();
        for t in &self.tasks {
            if method.is_some_and(|m| m != t.method_id) {
                continue;
            }
            let p = methods.entry(&t.method_id).or_insert_with(|| MethodProgress {
                method_id: t.method_id.clone(),
                pairs: 0,
                unjudged: 0,
                single: 0,
                double: 0,
                provisional: false,
            });
            p.pairs += 1;
            match self.pair_verdicts(t) {
                0 => p.unjudged += 1,
                1 => p.single += 1,
                _ => p.double += 1,
            }
            p.provisional = p.unjudged + p.single > 0;
        }
        let records: Vec<VerdictRecord> =
            self.verdicts.values().filter(|r| method.is_none_or(|m| m == r.method_id)).cloned().collect();
        Progress {
            annotators: self.annotators.iter().cloned().collect(),
            verdicts: records.len(),
            methods: methods.into_values().collect(),
            report: live_report(&records, self.policy),
        }
    }
}

/// Scores records exactly as the offline bench does; `None` until any
/// method has an applicable answer.
pub fn live_report(records: &[VerdictRecord], policy: Policy) -> Option<BenchReport> {
    report_from_verdicts(records, policy).ok()
}

fn key(r: &VerdictRecord) -> VerdictKey {
    (r.method_id.clone(), r.poem_id.clone(), r.annotator_id.clone())
}

fn offense(t: UnitTestId, reason: &str) -> Offense {
    Offense { test: t.to_string(), reason: reason.to_string() }
}
