//! Whitespace event detection and classification.

use crate::config::{AnnotatorConfig, LengthUnit};
use crate::model::{Category, Poem, Subcategory, WhitespaceEvent, WispAnnotation, WispCategory};
use crate::syntax::{align_tokens_to_lines, classify_enjambment, AlignmentError, Alignment, SyntaxDoc};
use crate::text;

fn kind(c: Category, s: Subcategory) -> WispCategory {
    WispCategory::new(c, s).expect("classifier emits valid pairs")
}

/// Under period `p`, an indented line conforms when a line `p` positions
/// away (among nonblank lines) carries the same indent.
fn conforms(v: &[usize], i: usize, p: usize) -> bool {
    (i >= p && v[i - p] == v[i]) || (i + p < v.len() && v[i + p] == v[i])
}

/// Periods that explain at least `coverage` of the indented lines.
pub fn qualifying_periods(v: &[usize], cfg: &AnnotatorConfig) -> Vec<usize> {
    let indented: Vec<usize> = (0..v.len()).filter(|&i| v[i] > 0).collect();
    if indented.len() < 2 {
        return Vec::new();
    }
    (1..=cfg.indent_period_max)
        .filter(|&p| {
            let hits = indented.iter().filter(|&&i| conforms(v, i, p)).count();
            hits as f64 >= cfg.indent_coverage * indented.len() as f64
        })
        .collect()
}

pub fn classify_prefix(lines: &[&str], cfg: &AnnotatorConfig) -> Vec<WhitespaceEvent> {
    classify_prefix_excluding(lines, cfg, &[])
}

fn classify_prefix_excluding(lines: &[&str], cfg: &AnnotatorConfig, skip: &[usize]) -> Vec<WhitespaceEvent> {
    let rows: Vec<(usize, usize)> = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| !text::is_blank(l))
        .map(|(i, l)| (i, if skip.contains(&i) { 0 } else { text::leading_spaces(l) }))
        .collect();
    let v: Vec<usize> = rows.iter().map(|r| r.1).collect();
    let periods = qualifying_periods(&v, cfg);
    rows.iter()
        .enumerate()
        .filter(|(_, &(_, n))| n > 0)
        .map(|(k, &(line, n))| {
            let sub = if periods.iter().any(|&p| conforms(&v, k, p)) {
                Subcategory::StandardIndent
            } else {
                Subcategory::NonStandard
            };
            WhitespaceEvent {
                kind: kind(Category::Prefix, sub),
                line_index: line,
                char_span: Some((0, n)),
                length: Some(n),
                detail: None,
            }
        })
        .collect()
}

pub fn classify_internal(line_index: usize, line: &str) -> Vec<WhitespaceEvent> {
    text::internal_runs(line, 2)
        .into_iter()
        .map(|r| WhitespaceEvent {
            kind: kind(Category::Internal, Subcategory::NonStandard),
            line_index,
            char_span: Some((r.start, r.end)),
            length: Some(r.len()),
            detail: None,
        })
        .collect()
}

pub fn classify_vertical(lines: &[&str], cfg: &AnnotatorConfig) -> Vec<WhitespaceEvent> {
    text::blank_runs(lines)
        .into_iter()
        .map(|(start, len)| {
            let sub = if len == cfg.stanza_gap_lines { Subcategory::StandardStanza } else { Subcategory::NonStandard };
            WhitespaceEvent {
                kind: kind(Category::Vertical, sub),
                line_index: start,
                char_span: None,
                length: Some(len),
                detail: None,
            }
        })
        .collect()
}

fn hyphen_split(line: &str, next: &str) -> bool {
    let mut rev = line.trim_end().chars().rev();
    let (Some(h), Some(before)) = (rev.next(), rev.next()) else { return false };
    let next_first = next.chars().find(|&c| text::is_visible(c));
    matches!(h, '-' | '\u{2010}') && before.is_alphabetic() && next_first.is_some_and(char::is_lowercase)
}

pub fn classify_line_breaks(
    lines: &[&str],
    syntax: Option<(&SyntaxDoc, &Alignment)>,
    cfg: &AnnotatorConfig,
) -> Vec<WhitespaceEvent> {
    let nonblank: Vec<usize> = (0..lines.len()).filter(|&i| !text::is_blank(lines[i])).collect();
    nonblank
        .windows(2)
        .map(|w| {
            let (i, next) = (w[0], w[1]);
            let (sub, detail) = if cfg.ends_sentence(lines[i]) {
                (Subcategory::Standard, None)
            } else if hyphen_split(lines[i], lines[next]) {
                (Subcategory::Lexical, Some("hyphen".to_string()))
            } else if let Some((doc, a)) = syntax {
                let e = classify_enjambment(i, doc, a, &cfg.clausal_relations);
                (e.subcategory, e.detail)
            } else {
                (Subcategory::EnjambedUnknown, None)
            };
            WhitespaceEvent { kind: kind(Category::LineBreak, sub), line_index: i, char_span: None, length: None, detail }
        })
        .collect()
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn line_lengths(lines: &[&str], unit: LengthUnit) -> Vec<f64> {
    lines
        .iter()
        .filter(|l| !text::is_blank(l))
        .map(|l| match unit {
            LengthUnit::Characters => text::visible_len(l) as f64,
            LengthUnit::Words => text::words(l).len() as f64,
        })
        .collect()
}

pub fn classify_line_length(lines: &[&str], cfg: &AnnotatorConfig) -> WhitespaceEvent {
    let xs = line_lengths(lines, cfg.length_unit);
    let unit = match cfg.length_unit {
        LengthUnit::Characters => "characters",
        LengthUnit::Words => "words",
    };
    let (sub, detail) = if xs.len() < 2 {
        (Subcategory::Standard, format!("n={} unit={unit}", xs.len()))
    } else {
        let (mean, sd) = mean_std(&xs);
        let cv = if mean > 0.0 { sd / mean } else { 0.0 };
        let sub = if cv <= cfg.line_length_cv_threshold { Subcategory::Standard } else { Subcategory::NonStandard };
        (sub, format!("mean={mean:.3} stddev={sd:.3} cv={cv:.3} unit={unit}"))
    };
    WhitespaceEvent {
        kind: kind(Category::LineLength, sub),
        line_index: 0,
        char_span: None,
        length: None,
        detail: Some(detail),
    }
}

pub fn annotate(poem: &Poem, syntax: Option<&SyntaxDoc>, cfg: &AnnotatorConfig) -> Result<WispAnnotation, AlignmentError> {
    annotate_with_layout(poem, syntax, cfg, &[])
}

/// As [`annotate`]; `centered_lines` marks lines whose prefix came from
/// centering, dropped from PREFIX when `exclude_centered_prefix` is set.
pub fn annotate_with_layout(
    poem: &Poem,
    syntax: Option<&SyntaxDoc>,
    cfg: &AnnotatorConfig,
    centered_lines: &[usize],
) -> Result<WispAnnotation, AlignmentError> {
    let lines = poem.lines();
    let alignment = syntax.map(|doc| align_tokens_to_lines(doc, poem)).transpose()?;
    let skip = if cfg.exclude_centered_prefix { centered_lines } else { &[] };

    let mut events = classify_prefix_excluding(&lines, cfg, skip);
    for (i, l) in lines.iter().enumerate() {
        events.extend(classify_internal(i, l));
    }
    events.extend(classify_vertical(&lines, cfg));
    events.extend(classify_line_breaks(&lines, syntax.zip(alignment.as_ref()), cfg));
    events.push(classify_line_length(&lines, cfg));
    Ok(WispAnnotation::new(poem.id.clone(), events, lines.len()))
}
