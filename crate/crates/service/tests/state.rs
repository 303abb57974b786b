mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wisp_core::bench::{Policy, VerdictRecord};
use wisp_service::log::{LogError, VerdictLog};
use wisp_service::manifest::{Manifest, TaskSpec};
use wisp_service::state::{Pool, TaskFilter};

use common::verdict;

fn tasks(n: usize) -> Vec<TaskSpec> {
    let truths = ["a\nb\n", "a\n  b\n", "a  b\n\nc\n"];
    (0..n)
        .map(|i| {
            let poem = format!("p{}", i / 2);
            let method = ["m0", "m1"][i % 2].to_string();
            TaskSpec {
                task_id: format!("{poem}--{method}"),
                poem_id: poem,
                method_id: method,
                candidate_text: String::new(),
                applicable_tests: wisp_core::bench::applicable_tests(truths[i % 3]),
            }
        })
        .collect()
}

/// Without leases, every pick must be a least-judged task among those the
/// annotator has not judged, earliest in the manifest on ties.
#[test]
fn scheduling_simulation_prefers_least_covered_pairs() {
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..12);
        let specs = tasks(n);
        let mut pool = Pool::new(specs.clone(), Duration::ZERO, Policy::PreferFail);
        let annotators = ["a", "b", "c", "d"];
        let mut counts = vec![0usize; n];
        let mut judged: BTreeSet<(usize, &str)> = BTreeSet::new();
        let now = Instant::now();
        for step in 0..60 {
            let who = annotators[rng.gen_range(0..annotators.len())];
            let want = (0..n).filter(|i| !judged.contains(&(*i, who))).min_by_key(|&i| (counts[i], i));
            let got = pool.next_task(who, &TaskFilter::default(), now + Duration::from_millis(step));
            assert_eq!(got.as_ref().map(|t| t.task_id.clone()), want.map(|i| specs[i].task_id.clone()), "seed {seed}");
            if let Some(i) = want {
                // the annotator sometimes walks away without answering
                if rng.gen_bool(0.8) {
                    let t = &specs[i];
                    pool.apply(pool.validate(&verdict(&t.poem_id, &t.method_id, who, &t.applicable_tests, rng.gen())).unwrap());
                    counts[i] += 1;
                    judged.insert((i, who));
                }
            }
        }
        // an unjudged pair is open to everyone, so nothing reaches two while one remains
        if counts.iter().any(|&c| c >= 2) {
            assert!(counts.iter().all(|&c| c >= 1), "seed {seed}: {counts:?}");
        }
    }
}

#[test]
fn live_leases_push_others_elsewhere() {
    let specs = tasks(3);
    let mut pool = Pool::new(specs, Duration::from_secs(60), Policy::PreferFail);
    let t0 = Instant::now();
    let f = TaskFilter::default();
    let a = pool.next_task("a", &f, t0).unwrap();
    let b = pool.next_task("b", &f, t0).unwrap();
    let c = pool.next_task("c", &f, t0).unwrap();
    assert_eq!([a.task_id.as_str(), b.task_id.as_str(), c.task_id.as_str()], ["p0--m0", "p0--m1", "p1--m0"]);
    // once a's lease lapses, its task counts as uncovered again
    let d = pool.next_task("d", &f, t0 + Duration::from_secs(61)).unwrap();
    assert_eq!(d.task_id, "p0--m0");
    assert_eq!(pool.task("p0--m0", Some("a"), t0 + Duration::from_secs(61)).unwrap().assigned_to, None);
    assert_eq!(pool.task("p0--m0", Some("d"), t0 + Duration::from_secs(61)).unwrap().assigned_to.as_deref(), Some("d"));
}

#[test]
fn filters_restrict_the_pool() {
    let mut pool = Pool::new(tasks(6), Duration::from_secs(60), Policy::PreferFail);
    let now = Instant::now();
    let f = TaskFilter { method: Some("m1".into()), poem: None };
    let got: Vec<String> = std::iter::from_fn(|| pool.next_task("a", &f, now)).map(|t| t.task_id).collect();
    assert_eq!(got, ["p0--m1", "p1--m1", "p2--m1"]);
    let f = TaskFilter { method: None, poem: Some("p2".into()) };
    assert_eq!(pool.next_task("a", &f, now).unwrap().task_id, "p2--m0");
    assert!(pool.next_task("a", &f, now).is_none());
}

fn random_submissions(seed: u64, specs: &[TaskSpec]) -> Vec<VerdictRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rng.gen_range(0..40))
        .map(|_| {
            let t = &specs[rng.gen_range(0..specs.len())];
            let who = ["a", "b", "c"][rng.gen_range(0..3)];
            verdict(&t.poem_id, &t.method_id, who, &t.applicable_tests, rng.gen())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn log_replay_reconstructs_state(seed in any::<u64>(), compact_every in 1usize..8) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.jsonl");
        let specs = tasks(5);
        let (mut log, _) = VerdictLog::open(&path).unwrap();
        let mut live = Pool::new(specs.clone(), Duration::from_secs(60), Policy::Majority);
        for (i, r) in random_submissions(seed, &specs).into_iter().enumerate() {
            let stored = live.validate(&r).unwrap();
            log.append(&stored).unwrap();
            live.apply(stored);
            if i % compact_every == 0 {
                log.compact(&live.records()).unwrap();
            }
        }
        drop(log);
        let (_, records) = VerdictLog::open(&path).unwrap();
        let mut replayed = Pool::new(specs, Duration::from_secs(60), Policy::Majority);
        replayed.replay(records);
        prop_assert_eq!(replayed.records(), live.records());
        prop_assert_eq!(replayed.progress(None), live.progress(None));
    }
}

#[test]
fn torn_final_line_is_dropped() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.jsonl");
    let r = verdict("p0", "m0", "a", &[wisp_core::bench::UnitTestId::LbPresence], 1);
    {
        let (mut log, _) = VerdictLog::open(&path).unwrap();
        log.append(&r).unwrap();
    }
    let mut f = std::fs::OpenOptions::new().append(true).open(&path).unwrap();
    f.write_all(br#"{"poem_id":"p0","method_id":"m0","annot"#).unwrap();
    drop(f);
    let (mut log, records) = VerdictLog::open(&path).unwrap();
    assert_eq!(records, vec![r.clone()]);
    log.append(&r).unwrap();
    let (_, records) = VerdictLog::open(&path).unwrap();
    assert_eq!(records, vec![r.clone(), r]);
}

#[test]
fn corrupt_interior_line_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.jsonl");
    std::fs::write(&path, "{\"oops\": 1}\n\n").unwrap();
    assert!(matches!(VerdictLog::open(&path), Err(LogError::Corrupt { line: 1, .. })));
}

#[test]
fn compaction_keeps_latest_per_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.jsonl");
    let (mut log, _) = VerdictLog::open(&path).unwrap();
    let tests = [wisp_core::bench::UnitTestId::LbPresence];
    let rs = [verdict("p0", "m0", "a", &tests, 0), verdict("p0", "m0", "b", &tests, 1), verdict("p0", "m0", "a", &tests, 1)];
    for r in &rs {
        log.append(r).unwrap();
    }
    assert_eq!(log.lines(), 3);
    log.compact(&rs).unwrap();
    assert_eq!(log.lines(), 2);
    let (_, back) = VerdictLog::open(&path).unwrap();
    assert_eq!(back, vec![rs[2].clone(), rs[1].clone()]);
}

#[test]
fn manifest_defaults_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.txt"), "cand\n").unwrap();
    let json = r#"{"poems":[{"id":"x","image":"x.png","truth_text":"a\n   b\n"}],
                   "tasks":[{"poem_id":"x","method_id":"m","candidate":"c.txt"},
                            {"poem_id":"x","method_id":"n","candidate_text":"","applicable_tests":["VERTICAL_EXACT","LB_PRESENCE"]}]}"#;
    let m = Manifest::parse(json, dir.path()).unwrap();
    assert_eq!(m.tasks[0].task_id, "x--m");
    assert_eq!(m.tasks[0].candidate_text, "cand\n");
    assert_eq!(m.tasks[0].applicable_tests, wisp_core::bench::applicable_tests("a\n   b\n"));
    assert_eq!(m.tasks[1].applicable_tests.len(), 2);
    assert_eq!(m.images["x"], dir.path().join("x.png"));
    let dup = r#"{"poems":[{"id":"x","image":"i"}],"tasks":[{"poem_id":"x","method_id":"m","candidate_text":"","applicable_tests":[]},{"poem_id":"x","method_id":"m","task_id":"other","candidate_text":"","applicable_tests":[]}]}"#;
    assert!(Manifest::parse(dup, dir.path()).is_err());
    let orphan = r#"{"poems":[],"tasks":[{"poem_id":"x","method_id":"m","candidate_text":""}]}"#;
    assert!(Manifest::parse(orphan, dir.path()).is_err());
    let no_truth = r#"{"poems":[{"id":"x","image":"i"}],"tasks":[{"poem_id":"x","method_id":"m","candidate_text":""}]}"#;
    assert!(Manifest::parse(no_truth, dir.path()).is_err());
}
