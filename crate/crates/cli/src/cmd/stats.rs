use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use serde::Serialize;
use serde_json::json;
use wisp_core::model::{load_corpus, CorpusFormat};
use wisp_core::stats::{
    group_means, high_usage_tags, lengths_by_form, mean_whitespace_by_group, observations,
    punctuation_line_end_table, temporal_trend, Dimension, GroupTable, Mode, PlotData, PunctTable, TagTable,
};
use wisp_core::{Category, WispAnnotation};

use crate::args::StatsArgs;
use crate::config::{existing, CliConfig};
use crate::error::{io_err, CliError, Result};
use crate::io;

#[derive(Serialize)]
struct StatsOutput<'a> {
    mode: Mode,
    tables: &'a [GroupTable],
    trend: &'a GroupTable,
    punctuation: &'a [PunctTable],
    high_usage: &'a [TagTable],
}

fn read_annotations(path: &Path) -> Result<Vec<WispAnnotation>> {
    let f = std::fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| CliError::Data(format!("{} line {}: {e}", path.display(), i + 1)))?);
    }
    Ok(out)
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.3}"))
}

fn ci(v: Option<(f64, f64)>) -> String {
    v.map_or("-".into(), |(a, b)| format!("[{a:.3}, {b:.3}]"))
}

pub fn render_group(t: &GroupTable, title: &str) -> String {
    let mut s = format!("== {title} ({}) ==\n", t.mode.as_str());
    let _ = writeln!(
        s,
        "{:<24} {:>6} {:>12} {:>20} {:>13} {:>20} {:>7}",
        "group", "poems", "prefix_mean", "prefix_ci95", "internal_mean", "internal_ci95", "events"
    );
    for r in &t.rows {
        let _ = writeln!(
            s,
            "{:<24} {:>6} {:>12} {:>20} {:>13} {:>20} {:>7}",
            r.group.value.to_string(),
            r.n_poems,
            opt(r.mean_prefix_len),
            ci(r.ci95_prefix),
            opt(r.mean_internal_len),
            ci(r.ci95_internal),
            r.nonstandard_event_count
        );
    }
    if t.rows.is_empty() {
        s += "(no groups)\n";
    }
    if !t.coverage.below_minimum.is_empty() {
        let _ = writeln!(s, "below minimum: {}", t.coverage.below_minimum.join(", "));
    }
    s
}

pub fn render_punct(t: &PunctTable) -> String {
    let mut s = format!("== line-final punctuation: {} ({} poems, {} lines) ==\n", t.form, t.poems, t.lines);
    s += "share of lines ending in token\n";
    for r in &t.line_end {
        let _ = writeln!(s, "  {:<4} {:>8.4} {:>8}/{}", r.token, r.share, r.count, r.total);
    }
    s += "share of token uses at line end\n";
    for r in &t.usage {
        let _ = writeln!(s, "  {:<4} {:>8.4} {:>8}/{}", r.token, r.share, r.count, r.total);
    }
    s
}

pub fn render_tags(t: &TagTable) -> String {
    let pct = t.percentile.map_or("-".into(), |p| p.to_string());
    let mut s = format!("== high {} usage by tag (p75 = {pct} over {} lengths) ==\n", t.ws_type, t.lengths);
    let _ = writeln!(s, "{:<24} {:>6} {:>6} {:>8}  {:<24} low_example", "tag", "poems", "high", "share", "high_example");
    for r in &t.descending {
        let _ = writeln!(
            s,
            "{:<24} {:>6} {:>6} {:>8.4}  {:<24} {}",
            r.tag,
            r.n_poems,
            r.n_high,
            r.proportion,
            r.high_example.as_deref().unwrap_or("-"),
            r.low_example.as_deref().unwrap_or("-")
        );
    }
    if !t.below_minimum.is_empty() {
        let _ = writeln!(s, "below minimum: {} tags", t.below_minimum.len());
    }
    s
}

fn write_csv(path: &Path, plot: &PlotData) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    w.write_record(&plot.header).map_err(csv_err)?;
    for r in &plot.rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    io::write_file(path, bytes)
}

pub fn run(args: StatsArgs, cfg: &CliConfig) -> Result<()> {
    let sc = &cfg.stats;
    let mode = args
        .mode
        .or(sc.mode)
        .ok_or_else(|| CliError::Usage("--mode is required: per_line or per_nonstandard_event".into()))?;
    let corpus = existing(args.corpus.or(cfg.paths.corpus.clone()), "corpus")?;
    let ann_path = args.annotations.or(cfg.paths.annotations.clone());
    if let Some(p) = &ann_path {
        if !p.exists() {
            return Err(CliError::Usage(format!("annotations {} does not exist", p.display())));
        }
    }
    let method_label = args.method_label.or(sc.method_label.clone());
    let tag_min = args.tag_min.unwrap_or(sc.tag_min);
    let punct_min = args.punct_min_count.unwrap_or(sc.punct_min_count);
    let top_k = args.top_k.or(sc.top_k);
    let forms = if args.forms.is_empty() { sc.forms.clone() } else { args.forms };
    let mut dims = if args.dimensions.is_empty() { sc.dimensions.clone() } else { args.dimensions };
    if dims.is_empty() {
        dims = vec![Dimension::Source, Dimension::Form, Dimension::Tag, Dimension::BirthDecade];
        if method_label.is_some() {
            dims.push(Dimension::Method);
        }
    }
    let out = args.out.or(cfg.paths.out.clone());

    let poems = load_corpus(&corpus, CorpusFormat::JsonLines)?;
    let annotations = match &ann_path {
        Some(p) => read_annotations(p)?,
        None => {
            let docs = vec![None; poems.len()];
            crate::cmd::annotate::annotate_all(&poems, &docs, &cfg.annotator, cfg.jobs)?
        }
    };
    let obs = observations(&poems, &annotations, method_label.as_deref()).map_err(|e| CliError::Data(e.to_string()))?;

    let mut text = String::new();
    let mut tables = Vec::new();
    for &d in &dims {
        let t = mean_whitespace_by_group(&obs, d, mode, if d == Dimension::Tag { tag_min } else { 0 });
        // coverage shortfalls are logged by the stats module
        if t.rows.is_empty() {
            eprintln!("warning: no {d} groups; table is empty");
        }
        text += &render_group(&t, &format!("mean whitespace length by {d}"));
        text.push('\n');
        tables.push(t);
    }
    let trend = temporal_trend(&obs);
    text += &render_group(&trend, "whitespace length by poet birth decade");
    text.push('\n');

    let punctuation = punctuation_line_end_table(&poems, (!forms.is_empty()).then_some(&forms[..]), punct_min, top_k);
    for t in &punctuation {
        text += &render_punct(t);
        text.push('\n');
    }
    let mut high = Vec::new();
    for c in [Category::Prefix, Category::Internal] {
        let t = high_usage_tags(&obs, c, tag_min).map_err(|e| CliError::Data(e.to_string()))?;
        text += &render_tags(&t);
        text.push('\n');
        high.push(t);
    }
    print!("{text}");

    if let Some(dir) = out {
        let doc = StatsOutput { mode, tables: &tables, trend: &trend, punctuation: &punctuation, high_usage: &high };
        io::write_json(&dir.join("stats.json"), &doc)?;
        io::write_file(&dir.join("stats.txt"), &text)?;
        let mut plots = vec![lengths_by_form(&obs, Category::Prefix), lengths_by_form(&obs, Category::Internal)];
        plots.extend(tables.iter().map(group_means));
        let mut trend_plot = group_means(&trend);
        trend_plot.name = "trend_by_birth_decade".into();
        plots.push(trend_plot);
        for p in &plots {
            write_csv(&dir.join("plots").join(format!("{}.csv", p.name)), p)?;
        }
        let mut inputs: Vec<&Path> = vec![&corpus];
        if let Some(p) = &ann_path {
            inputs.push(p);
        }
        let config = json!({
            "mode": mode,
            "dimensions": dims,
            "method_label": method_label,
            "tag_min": tag_min,
            "punct_min_count": punct_min,
            "top_k": top_k,
            "forms": forms,
            "annotator": if ann_path.is_none() { Some(&cfg.annotator) } else { None },
        });
        io::write_provenance(&dir.join("stats.provenance.json"), "stats", &config, &inputs, json!({ "poems": poems.len() }))?;
    }
    Ok(())
}
