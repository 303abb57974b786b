use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;
use wisp_core::model::{load_corpus, CorpusFormat};
use wisp_core::syntax::{align_tokens_to_lines, parse_conllu, spanning_triples, SyntaxDoc, TripleCounts};
use wisp_core::{annotate, validate_annotation, AnnotatorConfig, Poem, WispAnnotation};

use crate::args::{AnnotateArgs, AnnotationFormat};
use crate::config::{existing, CliConfig};
use crate::error::{io_err, CliError, Result};
use crate::io;

/// CoNLL-U path per poem id.
fn syntax_paths(path: &Path) -> Result<BTreeMap<String, PathBuf>> {
    if path.is_dir() {
        let mut m = BTreeMap::new();
        for e in std::fs::read_dir(path).map_err(io_err(path))? {
            let p = e.map_err(io_err(path))?.path();
            if p.extension().is_some_and(|x| x == "conllu") {
                m.insert(p.file_stem().expect("has a name").to_string_lossy().into_owned(), p);
            }
        }
        return Ok(m);
    }
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let raw: BTreeMap<String, PathBuf> = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: syntax manifest must map poem ids to paths: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(raw.into_iter().map(|(k, v)| (k, base.join(v))).collect())
}

pub fn annotate_all(poems: &[Poem], docs: &[Option<SyntaxDoc>], cfg: &AnnotatorConfig, jobs: Option<usize>) -> Result<Vec<WispAnnotation>> {
    let results: Vec<std::result::Result<WispAnnotation, String>> = io::thread_pool(jobs)?.install(|| {
        poems
            .par_iter()
            .zip(docs)
            .map(|(p, d)| {
                let a = annotate(p, d.as_ref(), cfg).map_err(|e| format!("poem {}: {e}", p.id))?;
                let report = validate_annotation(&a, p);
                if !report.is_empty() {
                    return Err(format!("poem {}: annotation failed validation: {report:?}", p.id));
                }
                Ok(a)
            })
            .collect()
    });
    results.into_iter().collect::<std::result::Result<_, _>>().map_err(CliError::Data)
}

pub fn run(args: AnnotateArgs, cfg: &CliConfig) -> Result<()> {
    let mut acfg = cfg.annotator.clone();
    if let Some(v) = args.line_length_cv_threshold {
        acfg.line_length_cv_threshold = v;
    }
    acfg.exclude_centered_prefix |= args.exclude_centered_prefix;
    acfg.validate().map_err(|e| CliError::Usage(format!("invalid annotator settings: {e}")))?;
    let corpus = existing(args.corpus.or(cfg.paths.corpus.clone()), "corpus")?;
    let syntax = args.syntax.or(cfg.paths.syntax.clone());
    if let Some(s) = &syntax {
        if !s.exists() {
            return Err(CliError::Usage(format!("syntax {} does not exist", s.display())));
        }
    }
    let out = args.out.or(cfg.paths.annotations.clone()).filter(|p| p.as_os_str() != "-");

    let poems = load_corpus(&corpus, CorpusFormat::JsonLines)?;
    let by_id = match &syntax {
        Some(s) => syntax_paths(s)?,
        None => BTreeMap::new(),
    };
    let mut docs = Vec::with_capacity(poems.len());
    for p in &poems {
        let doc = match by_id.get(&p.id) {
            Some(path) => {
                let mut d = parse_conllu(path).map_err(|source| CliError::Syntax { path: path.display().to_string(), source })?;
                d.poem_id = p.id.clone();
                Some(d)
            }
            None => None,
        };
        docs.push(doc);
    }
    let missing = docs.iter().filter(|d| d.is_none()).count();
    if missing > 0 {
        eprintln!("notice: {missing} of {} poems have no syntax; their enjambed breaks are labeled enjambed_unknown", poems.len());
    }

    let annotations = annotate_all(&poems, &docs, &acfg, cfg.jobs)?;

    let mut buf = Vec::new();
    match args.format {
        AnnotationFormat::Jsonl => {
            for a in &annotations {
                serde_json::to_writer(&mut buf, a).expect("annotations serialize");
                buf.push(b'\n');
            }
        }
        AnnotationFormat::Tsv => {
            buf.extend_from_slice(b"poem_id\tcategory\tsubcategory\tline\tspan\tlength\tdetail\n");
            for a in &annotations {
                for e in &a.events {
                    buf.extend_from_slice(e.tsv_row(&a.poem_id).as_bytes());
                    buf.push(b'\n');
                }
            }
        }
    }
    match &out {
        Some(path) => io::write_file(path, &buf)?,
        None => std::io::stdout().lock().write_all(&buf).map_err(io_err(Path::new("<stdout>")))?,
    }

    if let Some(tpath) = &args.triples {
        let mut total = TripleCounts::default();
        for (p, d) in poems.iter().zip(&docs) {
            if let Some(d) = d {
                let a = align_tokens_to_lines(d, p).map_err(|e| CliError::Data(format!("poem {}: {e}", p.id)))?;
                total.merge(&spanning_triples(p, d, &a, &acfg));
            }
        }
        io::write_file(tpath, total.to_tsv())?;
    }

    if let Some(path) = &out {
        let mut inputs: Vec<&Path> = vec![&corpus];
        if let Some(s) = &syntax {
            inputs.push(s);
        }
        let details = json!({ "poems": poems.len(), "without_syntax": missing, "format": format!("{:?}", args.format).to_lowercase() });
        io::write_provenance(&io::sidecar(path), "annotate", &acfg, &inputs, details)?;
    }
    Ok(())
}
