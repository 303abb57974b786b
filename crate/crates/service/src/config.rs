use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use wisp_core::bench::Policy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    pub manifest: PathBuf,
    pub log: PathBuf,
    /// Directory with the built review UI, mounted at `/ui`.
    pub ui_dir: Option<PathBuf>,
    /// How long a served task stays reserved for its annotator.
    pub lease_secs: u64,
    /// Rewrite the log once this many superseded records pile up.
    pub compact_after: usize,
    pub policy: Policy,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: "127.0.0.1:8080".into(),
            manifest: PathBuf::from("manifest.json"),
            log: PathBuf::from("verdicts.jsonl"),
            ui_dir: None,
            lease_secs: 900,
            compact_after: 256,
            policy: Policy::PreferFail,
        }
    }
}
