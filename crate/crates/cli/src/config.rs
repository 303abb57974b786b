//! File configuration. Relative paths resolve against the file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wisp_core::bench::Policy;
use wisp_core::stats::{Dimension, Mode};
use wisp_core::{AnnotatorConfig, LinearizerConfig};
use wisp_service::ServiceConfig;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub syntax: Option<PathBuf>,
    pub verdicts: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub policy: Policy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsSection {
    pub mode: Option<Mode>,
    pub dimensions: Vec<Dimension>,
    pub method_label: Option<String>,
    pub tag_min: usize,
    pub punct_min_count: usize,
    pub top_k: Option<usize>,
    pub forms: Vec<String>,
}

impl Default for StatsSection {
    fn default() -> Self {
        StatsSection {
            mode: None,
            dimensions: Vec::new(),
            method_label: None,
            tag_min: 100,
            punct_min_count: 100,
            top_k: None,
            forms: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub jobs: Option<usize>,
    pub paths: Paths,
    pub linearizer: LinearizerConfig,
    pub annotator: AnnotatorConfig,
    pub bench: BenchSection,
    pub stats: StatsSection,
    pub serve: ServiceConfig,
}

impl CliConfig {
    pub fn load(path: Option<&Path>) -> Result<CliConfig> {
        let Some(path) = path else { return Ok(CliConfig::default()) };
        let err = |message: String| CliError::Config { path: path.display().to_string(), message };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let mut cfg: CliConfig = toml::from_str(&text).map_err(|e| err(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.paths.corpus,
            &mut cfg.paths.annotations,
            &mut cfg.paths.syntax,
            &mut cfg.paths.verdicts,
            &mut cfg.paths.out,
            &mut cfg.serve.ui_dir,
        ]
        .into_iter()
        .flatten()
        {
            *p = base.join(&*p);
        }
        cfg.serve.manifest = base.join(&cfg.serve.manifest);
        cfg.serve.log = base.join(&cfg.serve.log);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |e: wisp_core::config::ConfigError| CliError::Usage(format!("invalid configuration: {e}"));
        self.linearizer.validate().map_err(bad)?;
        self.annotator.validate().map_err(bad)?;
        if self.jobs == Some(0) {
            return Err(CliError::Usage("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// An input path that must exist before any stage runs.
pub fn existing(path: Option<PathBuf>, what: &str) -> Result<PathBuf> {
    let p = path.ok_or_else(|| CliError::Usage(format!("missing {what} (flag or config)")))?;
    if !p.exists() {
        return Err(CliError::Usage(format!("{what} {} does not exist", p.display())));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_and_resolves_paths() {
        let dir = std::env::temp_dir().join(format!("wisp-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("wisp.toml");
        std::fs::write(
            &file,
            "jobs = 2\n[paths]\ncorpus = \"c.jsonl\"\n[stats]\nmode = \"per_line\"\n[annotator]\nindent_coverage = 0.9\n[serve]\nlog = \"v.jsonl\"\n",
        )
        .unwrap();
        let cfg = CliConfig::load(Some(&file)).unwrap();
        assert_eq!(cfg.jobs, Some(2));
        assert_eq!(cfg.paths.corpus, Some(dir.join("c.jsonl")));
        assert_eq!(cfg.stats.mode, Some(Mode::PerLine));
        assert_eq!(cfg.annotator.indent_coverage, 0.9);
        assert_eq!(cfg.serve.log, dir.join("v.jsonl"));
        std::fs::write(&file, "[paths]\ncorpuss = 1\n").unwrap();
        assert!(matches!(CliConfig::load(Some(&file)), Err(CliError::Config { .. })));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
