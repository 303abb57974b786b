use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;
use wisp_core::{linearize, LinearizerConfig};

use crate::args::LinearizeArgs;
use crate::config::CliConfig;
use crate::error::{CliError, Result};
use crate::io;

pub fn run(args: LinearizeArgs, cfg: &CliConfig) -> Result<()> {
    let mut lin: LinearizerConfig = cfg.linearizer.clone();
    if let Some(v) = args.px_per_space {
        lin.indent.px_per_space = v;
    }
    if let Some(v) = args.em_per_space {
        lin.indent.em_per_space = v;
    }
    if let Some(v) = args.max_indent_spaces {
        lin.indent.max_indent_spaces = v;
    }
    if let Some(v) = args.center_width {
        lin.center_width = v;
    }
    if let Some(v) = args.tab_width {
        lin.tab_width = v;
    }
    lin.validate().map_err(|e| CliError::Usage(format!("invalid linearizer settings: {e}")))?;
    let out_dir = args.out.or(cfg.paths.out.clone()).ok_or_else(|| CliError::Usage("missing --out directory".into()))?;
    let inputs = io::html_inputs(&args.inputs)?;
    let mut stems = BTreeMap::new();
    for p in &inputs {
        let stem = p.file_stem().expect("inputs are files").to_string_lossy().into_owned();
        if let Some(prev) = stems.insert(stem.clone(), p) {
            return Err(CliError::Usage(format!("{} and {} would both write {stem}.txt", prev.display(), p.display())));
        }
    }

    let results: Vec<_> = io::thread_pool(cfg.jobs)?.install(|| {
        inputs
            .par_iter()
            .map(|p| {
                let html = std::fs::read_to_string(p).map_err(|e| e.to_string())?;
                linearize(&html, &lin).map_err(|e| e.to_string())
            })
            .collect()
    });

    let mut failed = 0;
    let mut files = Vec::new();
    for (p, r) in inputs.iter().zip(results) {
        let stem = p.file_stem().expect("inputs are files").to_string_lossy();
        match r {
            Ok(out) => {
                let target = out_dir.join(format!("{stem}.txt"));
                io::write_file(&target, &out.text)?;
                for w in &out.warnings {
                    log::warn!("{}: {w}", p.display());
                }
                files.push(json!({
                    "input": p.display().to_string(),
                    "output": target.display().to_string(),
                    "style": out.style,
                    "centered_lines": out.centered_lines,
                    "warnings": out.warnings,
                }));
            }
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                failed += 1;
                files.push(json!({ "input": p.display().to_string(), "error": e }));
            }
        }
    }
    let paths: Vec<&std::path::Path> = inputs.iter().map(|p| p.as_path()).collect();
    io::write_provenance(&out_dir.join("linearize.provenance.json"), "linearize", &lin, &paths, json!({ "files": files }))?;
    if failed > 0 {
        return Err(CliError::Partial { failed, total: inputs.len() });
    }
    Ok(())
}
