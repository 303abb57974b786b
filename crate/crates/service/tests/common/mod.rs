#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::json;
use wisp_core::bench::{Answer, UnitTestId, VerdictRecord};
use wisp_service::ServiceConfig;

pub const POEMS: [(&str, &str); 3] = [
    ("p1", "Plain first line,\nand a plain second.\n"),
    ("p2", "An indented\n    answer\n\nafter  a gap.\n"),
    ("p3", "    all\n        steps\n            down.\n"),
];
pub const METHODS: [&str; 2] = ["resiliparse", "trafilatura"];

/// Writes a manifest with every poem under every method, candidates being
/// the truth with all leading space stripped.
pub fn pool_dir(dir: &Path) -> ServiceConfig {
    let mut poems = Vec::new();
    let mut tasks = Vec::new();
    for (id, truth) in POEMS {
        std::fs::write(dir.join(format!("{id}.png")), format!("\u{89}PNG fake {id}")).unwrap();
        std::fs::write(dir.join(format!("{id}.txt")), truth).unwrap();
        poems.push(json!({ "id": id, "image": format!("{id}.png"), "truth": format!("{id}.txt") }));
    }
    for m in METHODS {
        for (id, truth) in POEMS {
            let stripped: String = truth.lines().map(|l| l.trim_start().to_string() + "\n").collect();
            tasks.push(json!({ "poem_id": id, "method_id": m, "candidate_text": stripped }));
        }
    }
    let manifest = dir.join("manifest.json");
    std::fs::write(&manifest, serde_json::to_string_pretty(&json!({ "poems": poems, "tasks": tasks })).unwrap()).unwrap();
    ServiceConfig { manifest, log: dir.join("log/verdicts.jsonl"), ..ServiceConfig::default() }
}

/// A complete verdict over `tests`, with answers drawn from `bits`.
pub fn verdict(poem: &str, method: &str, annotator: &str, tests: &[UnitTestId], bits: u64) -> VerdictRecord {
    let answers: BTreeMap<UnitTestId, Answer> = tests
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, if bits >> (i % 64) & 1 == 1 { Answer::Pass } else { Answer::Fail }))
        .collect();
    VerdictRecord {
        poem_id: poem.into(),
        method_id: method.into(),
        annotator_id: annotator.into(),
        answers,
        ocr_error: bits >> 40 & 3 == 0,
    }
}
