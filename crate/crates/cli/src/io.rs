use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use wisp_core::model::{load_corpus, normalize_body, CorpusFormat};

use crate::error::{io_err, CliError, Result};

pub fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    std::fs::write(path, bytes).map_err(io_err(path))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    write_file(path, s)
}

fn files_with_ext(dir: &Path, exts: &[&str]) -> Result<Vec<PathBuf>> {
    let mut v = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err(dir))? {
        let p = entry.map_err(io_err(dir))?.path();
        if p.is_file() && p.extension().and_then(|e| e.to_str()).is_some_and(|e| exts.contains(&e.to_ascii_lowercase().as_str())) {
            v.push(p);
        }
    }
    v.sort();
    Ok(v)
}

/// Expands directories to their `.html`/`.htm` files, sorted by name.
pub fn html_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            out.extend(files_with_ext(p, &["html", "htm"])?);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            return Err(CliError::Usage(format!("input {} does not exist", p.display())));
        }
    }
    Ok(out)
}

/// Poem texts by id, from a JSON Lines corpus or a directory of
/// `<poem_id>.txt` files.
pub fn read_texts(path: &Path) -> Result<BTreeMap<String, String>> {
    if path.is_dir() {
        let mut m = BTreeMap::new();
        for f in files_with_ext(path, &["txt"])? {
            let id = f.file_stem().expect("files have names").to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&f).map_err(io_err(&f))?;
            m.insert(id, normalize_body(&text));
        }
        Ok(m)
    } else {
        Ok(load_corpus(path, CorpusFormat::JsonLines)?.into_iter().map(|p| (p.id, p.body)).collect())
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

#[derive(Serialize)]
struct Input {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: Value,
    inputs: Vec<Input>,
    details: Value,
}

/// Sidecar recording the tool version, the effective config and input hashes.
pub fn write_provenance(path: &Path, command: &str, config: &impl Serialize, inputs: &[&Path], details: Value) -> Result<()> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            for f in files_with_ext(p, &["txt", "conllu", "html", "htm", "jsonl", "json"])? {
                files.push(Input { path: f.display().to_string(), sha256: sha256_file(&f)? });
            }
        } else {
            files.push(Input { path: p.display().to_string(), sha256: sha256_file(p)? });
        }
    }
    let doc = Provenance {
        tool: "wisp",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: serde_json::to_value(config).expect("config serializes"),
        inputs: files,
        details,
    };
    write_json(path, &doc)
}

/// Sidecar path next to an output file: `x.jsonl` gets `x.jsonl.provenance.json`.
pub fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".provenance.json");
    PathBuf::from(s)
}

pub fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}
