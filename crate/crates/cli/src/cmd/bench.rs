use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde_json::json;
use wisp_core::bench::{auto_verdict, report_from_verdicts, BenchError, BenchReport, VerdictRecord};

use crate::args::{BenchArgs, BenchMode};
use crate::config::CliConfig;
use crate::error::{io_err, CliError, Result};
use crate::io;

/// Verdict records from JSON Lines, blank lines skipped.
pub fn read_verdicts(path: &Path) -> Result<Vec<VerdictRecord>> {
    let f = std::fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line)
            .map_err(|e| CliError::Data(format!("{} line {}: {e}", path.display(), i + 1)))?;
        out.push(r);
    }
    Ok(out)
}

fn parse_candidate(s: &str) -> Result<(String, PathBuf)> {
    match s.split_once('=') {
        Some((m, p)) if !m.is_empty() && !p.is_empty() => Ok((m.to_string(), PathBuf::from(p))),
        _ => Err(CliError::Usage(format!("--candidates expects METHOD=PATH, got {s:?}"))),
    }
}

/// One auto verdict per (method, truth poem). Poems missing from a method's
/// output and poems with no applicable test are skipped.
pub fn auto_records(truths: &Path, candidates: &[(String, PathBuf)]) -> Result<Vec<VerdictRecord>> {
    let truth = io::read_texts(truths)?;
    let mut records = Vec::new();
    for (method, path) in candidates {
        let cands = io::read_texts(path)?;
        let mut missing = 0;
        for (id, t) in &truth {
            let Some(c) = cands.get(id) else {
                missing += 1;
                continue;
            };
            let r = auto_verdict(id, method, t, c);
            if r.applicable() > 0 {
                records.push(r);
            }
        }
        if missing > 0 {
            log::warn!("{method}: {missing} of {} truth poems have no candidate", truth.len());
        }
    }
    Ok(records)
}

pub fn report(records: &[VerdictRecord], policy: wisp_core::bench::Policy) -> Result<BenchReport> {
    report_from_verdicts(records, policy).map_err(|e| match e {
        BenchError::NoRecords => CliError::Data("no scorable verdicts".into()),
        e => CliError::Data(e.to_string()),
    })
}

pub fn run(args: BenchArgs, cfg: &CliConfig) -> Result<()> {
    let policy = args.policy.unwrap_or(cfg.bench.policy);
    let out = args.out.or(cfg.paths.out.clone());
    let (records, inputs): (Vec<VerdictRecord>, Vec<PathBuf>) = match args.mode {
        BenchMode::Auto => {
            if args.verdicts.is_some() {
                return Err(CliError::Usage("auto mode does not take --verdicts; human and auto verdicts are not mixed".into()));
            }
            let truths = crate::config::existing(args.truths, "truths")?;
            if args.candidates.is_empty() {
                return Err(CliError::Usage("auto mode needs at least one --candidates METHOD=PATH".into()));
            }
            let cands = args.candidates.iter().map(|s| parse_candidate(s)).collect::<Result<Vec<_>>>()?;
            let mut seen = BTreeSet::new();
            for (m, p) in &cands {
                if !seen.insert(m) {
                    return Err(CliError::Usage(format!("method {m} given twice")));
                }
                if !p.exists() {
                    return Err(CliError::Usage(format!("candidates {} does not exist", p.display())));
                }
            }
            let records = auto_records(&truths, &cands)?;
            let mut inputs = vec![truths];
            inputs.extend(cands.into_iter().map(|c| c.1));
            (records, inputs)
        }
        BenchMode::Human => {
            if args.truths.is_some() || !args.candidates.is_empty() {
                return Err(CliError::Usage("human mode takes only --verdicts; human and auto verdicts are not mixed".into()));
            }
            let v = crate::config::existing(args.verdicts.or(cfg.paths.verdicts.clone()), "verdicts")?;
            (read_verdicts(&v)?, vec![v])
        }
    };
    let report = report(&records, policy)?;
    let table = report.to_table();
    print!("{table}");
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(dir) = out {
        io::write_json(&dir.join("bench_report.json"), &report)?;
        io::write_file(&dir.join("bench_report.txt"), &table)?;
        if args.mode == BenchMode::Auto {
            let mut buf = String::new();
            for r in &records {
                buf += &serde_json::to_string(r).expect("records serialize");
                buf.push('\n');
            }
            io::write_file(&dir.join("auto_verdicts.jsonl"), buf)?;
        }
        let paths: Vec<&Path> = inputs.iter().map(|p| p.as_path()).collect();
        let mode = format!("{:?}", args.mode).to_lowercase();
        io::write_provenance(
            &dir.join("bench.provenance.json"),
            "bench",
            &json!({ "mode": mode, "policy": policy }),
            &paths,
            json!({ "records": records.len() }),
        )?;
    }
    Ok(())
}
