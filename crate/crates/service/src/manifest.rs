//! Task pool definition: pre-rendered poem images, ground truth and the
//! candidate text each method produced.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use wisp_core::bench::{applicable_tests, UnitTestId};
use wisp_core::model::normalize_body;

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid manifest: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("task {task} refers to unknown poem {poem}")]
    UnknownPoem { task: String, poem: String },
    #[error("duplicate task {0}")]
    DuplicateTask(String),
    #[error("duplicate poem {0}")]
    DuplicatePoem(String),
    #[error("task {0} needs a candidate or candidate_text")]
    NoCandidate(String),
    #[error("task {0} has no applicable_tests and its poem has no truth text")]
    NoTruth(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    poems: Vec<RawPoem>,
    tasks: Vec<RawTask>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoem {
    id: String,
    image: PathBuf,
    #[serde(default)]
    truth: Option<PathBuf>,
    #[serde(default)]
    truth_text: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    #[serde(default)]
    task_id: Option<String>,
    poem_id: String,
    method_id: String,
    #[serde(default)]
    candidate: Option<PathBuf>,
    #[serde(default)]
    candidate_text: Option<String>,
    #[serde(default)]
    applicable_tests: Option<Vec<UnitTestId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub task_id: String,
    pub poem_id: String,
    pub method_id: String,
    pub candidate_text: String,
    pub applicable_tests: Vec<UnitTestId>,
}

#[derive(Debug, Clone, Default)]
pub struct Manifest {
    /// Poem id to image path.
    pub images: BTreeMap<String, PathBuf>,
    pub tasks: Vec<TaskSpec>,
}

pub fn default_task_id(poem_id: &str, method_id: &str) -> String {
    format!("{poem_id}--{method_id}")
}

fn read(path: &Path) -> Result<String, ManifestError> {
    std::fs::read_to_string(path).map_err(|source| ManifestError::Io { path: path.display().to_string(), source })
}

impl Manifest {
    /// Relative paths resolve against the manifest's directory.
    pub fn load(path: &Path) -> Result<Manifest, ManifestError> {
        let base = path.parent().unwrap_or(Path::new("."));
        Manifest::parse(&read(path)?, base)
    }

    pub fn parse(json: &str, base: &Path) -> Result<Manifest, ManifestError> {
        let raw: RawManifest = serde_json::from_str(json)?;
        let mut images = BTreeMap::new();
        let mut truths = BTreeMap::new();
        for p in raw.poems {
            if images.insert(p.id.clone(), base.join(&p.image)).is_some() {
                return Err(ManifestError::DuplicatePoem(p.id));
            }
            let truth = match (p.truth_text, p.truth) {
                (Some(t), _) => Some(t),
                (None, Some(path)) => Some(read(&base.join(path))?),
                (None, None) => None,
            };
            if let Some(t) = truth {
                truths.insert(p.id, normalize_body(&t));
            }
        }
        let mut seen = HashSet::new();
        let mut tasks = Vec::new();
        for t in raw.tasks {
            let task_id = t.task_id.unwrap_or_else(|| default_task_id(&t.poem_id, &t.method_id));
            if !seen.insert(task_id.clone()) || !seen.insert(format!("\0{}\0{}", t.poem_id, t.method_id)) {
                return Err(ManifestError::DuplicateTask(task_id));
            }
            if !images.contains_key(&t.poem_id) {
                return Err(ManifestError::UnknownPoem { task: task_id, poem: t.poem_id });
            }
            let candidate_text = match (t.candidate_text, t.candidate) {
                (Some(c), _) => c,
                (None, Some(path)) => read(&base.join(path))?,
                (None, None) => return Err(ManifestError::NoCandidate(task_id)),
            };
            let applicable_tests = match (t.applicable_tests, truths.get(&t.poem_id)) {
                (Some(mut list), _) => {
                    list.sort();
                    list.dedup();
                    list
                }
                (None, Some(truth)) => applicable_tests(truth),
                (None, None) => return Err(ManifestError::NoTruth(task_id)),
            };
            tasks.push(TaskSpec { task_id, poem_id: t.poem_id, method_id: t.method_id, candidate_text, applicable_tests });
        }
        Ok(Manifest { images, tasks })
    }
}
