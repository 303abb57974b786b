//! Corpus-level aggregates over annotated poems: grouped whitespace means,
//! punctuation at line ends, decade trends and high-usage tags.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Category, Poem, WispAnnotation};
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("unknown dimension `{0}` (expected source, form, tag, birth_decade or method)")]
    UnknownDimension(String),
    #[error("unknown mode `{0}` (expected per_line or per_nonstandard_event)")]
    UnknownMode(String),
    #[error("annotation for `{0}` has no matching poem")]
    MissingPoem(String),
    #[error("whitespace type must be PREFIX or INTERNAL, got {0}")]
    UnsupportedType(Category),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Source,
    Form,
    Tag,
    #[serde(alias = "birth-decade")]
    BirthDecade,
    Method,
}

impl Dimension {
    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Source => "source",
            Dimension::Form => "form",
            Dimension::Tag => "tag",
            Dimension::BirthDecade => "birth_decade",
            Dimension::Method => "method",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, StatsError> {
        [Dimension::Source, Dimension::Form, Dimension::Tag, Dimension::BirthDecade, Dimension::Method]
            .into_iter()
            .find(|d| d.as_str() == s.replace('-', "_"))
            .ok_or_else(|| StatsError::UnknownDimension(s.to_string()))
    }
}

/// Denominator used for the mean whitespace lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One value per nonblank line: the prefix width, and the summed
    /// internal run lengths. Lines without either contribute zero.
    #[serde(alias = "per-line")]
    PerLine,
    /// One value per PREFIX or INTERNAL event.
    #[serde(alias = "per-nonstandard-event")]
    PerNonstandardEvent,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::PerLine => "per_line",
            Mode::PerNonstandardEvent => "per_nonstandard_event",
        }
    }
}

impl FromStr for Mode {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, StatsError> {
        match s.replace('-', "_").as_str() {
            "per_line" => Ok(Mode::PerLine),
            "per_nonstandard_event" => Ok(Mode::PerNonstandardEvent),
            _ => Err(StatsError::UnknownMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupValue {
    Decade(i32),
    Text(String),
}

impl fmt::Display for GroupValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupValue::Decade(d) => write!(f, "{d}"),
            GroupValue::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub dimension: Dimension,
    pub value: GroupValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatRow {
    pub group: GroupKey,
    pub n_poems: usize,
    pub mean_prefix_len: Option<f64>,
    pub mean_internal_len: Option<f64>,
    /// PREFIX plus INTERNAL events in the group.
    pub nonstandard_event_count: usize,
    pub prefix_n: usize,
    pub internal_n: usize,
    pub ci95_prefix: Option<(f64, f64)>,
    pub ci95_internal: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub poems: usize,
    /// Poems lacking a value for the dimension.
    pub missing: usize,
    /// Groups dropped for falling under the membership minimum.
    pub below_minimum: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTable {
    pub dimension: Dimension,
    pub mode: Mode,
    pub rows: Vec<StatRow>,
    pub coverage: Coverage,
}

impl GroupTable {
    pub fn coverage_note(&self) -> Option<String> {
        let c = &self.coverage;
        (c.missing > 0).then(|| {
            format!("{} of {} poems have no {} and were excluded", c.missing, c.poems, self.dimension)
        })
    }
}

/// A poem joined with its annotation and, optionally, the linearization
/// method that produced the text.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub poem: &'a Poem,
    pub annotation: &'a WispAnnotation,
    pub method: Option<&'a str>,
}

/// Pairs every annotation with its poem, in annotation order.
pub fn observations<'a>(
    poems: &'a [Poem],
    annotations: &'a [WispAnnotation],
    method: Option<&'a str>,
) -> Result<Vec<Observation<'a>>, StatsError> {
    let by_id: HashMap<&str, &Poem> = poems.iter().map(|p| (p.id.as_str(), p)).collect();
    annotations
        .iter()
        .map(|a| {
            let poem = by_id.get(a.poem_id.as_str()).ok_or_else(|| StatsError::MissingPoem(a.poem_id.clone()))?;
            Ok(Observation { poem, annotation: a, method })
        })
        .collect()
}

pub fn decade(year: i32) -> i32 {
    year.div_euclid(10) * 10
}

fn group_values(o: &Observation<'_>, dim: Dimension) -> Vec<GroupValue> {
    let p = o.poem;
    match dim {
        Dimension::Source => vec![GroupValue::Text(p.source.as_str().to_string())],
        Dimension::Form => p.form.iter().map(|f| GroupValue::Text(f.clone())).collect(),
        Dimension::Tag => p.tags.iter().map(|t| GroupValue::Text(t.clone())).collect(),
        Dimension::BirthDecade => p.poet_birth_year.map(decade).map(GroupValue::Decade).into_iter().collect(),
        Dimension::Method => o.method.map(|m| GroupValue::Text(m.to_string())).into_iter().collect(),
    }
}

/// Values entering the prefix and internal means for one poem.
fn poem_values(o: &Observation<'_>, mode: Mode) -> (Vec<usize>, Vec<usize>) {
    let a = o.annotation;
    let len = |e: &crate::model::WhitespaceEvent| e.length.unwrap_or(0);
    match mode {
        Mode::PerNonstandardEvent => (
            a.events_of(Category::Prefix).map(len).collect(),
            a.events_of(Category::Internal).map(len).collect(),
        ),
        Mode::PerLine => {
            let mut prefix: BTreeMap<usize, usize> = BTreeMap::new();
            let mut internal: BTreeMap<usize, usize> = BTreeMap::new();
            for e in a.events_of(Category::Prefix) {
                *prefix.entry(e.line_index).or_default() += len(e);
            }
            for e in a.events_of(Category::Internal) {
                *internal.entry(e.line_index).or_default() += len(e);
            }
            let lines = o.poem.lines();
            let nonblank = lines.iter().enumerate().filter(|(_, l)| !text::is_blank(l)).map(|(i, _)| i);
            nonblank
                .map(|i| (prefix.get(&i).copied().unwrap_or(0), internal.get(&i).copied().unwrap_or(0)))
                .unzip()
        }
    }
}

fn mean(xs: &[usize]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<usize>() as f64 / xs.len() as f64)
}

pub const CI_MIN_N: usize = 30;

/// Normal-approximation interval: mean ± 1.96 standard errors, using the
/// sample standard deviation. `None` below [`CI_MIN_N`] values.
pub fn ci95(xs: &[usize]) -> Option<(f64, f64)> {
    if xs.len() < CI_MIN_N {
        return None;
    }
    let n = xs.len() as f64;
    let m = mean(xs)?;
    let var = xs.iter().map(|&x| (x as f64 - m).powi(2)).sum::<f64>() / (n - 1.0);
    let half = 1.96 * (var / n).sqrt();
    Some((m - half, m + half))
}

#[derive(Default)]
struct Acc {
    poems: usize,
    events: usize,
    prefix: Vec<usize>,
    internal: Vec<usize>,
}

/// Mean PREFIX and INTERNAL lengths per group. Groups are sorted by value;
/// tag groups with fewer than `tag_min` poems are dropped.
pub fn mean_whitespace_by_group(obs: &[Observation<'_>], dim: Dimension, mode: Mode, tag_min: usize) -> GroupTable {
    let mut groups: BTreeMap<GroupValue, Acc> = BTreeMap::new();
    let mut coverage = Coverage { poems: obs.len(), ..Coverage::default() };
    for o in obs {
        let keys = group_values(o, dim);
        if keys.is_empty() {
            coverage.missing += 1;
            continue;
        }
        let (prefix, internal) = poem_values(o, mode);
        let events = o.annotation.events_of(Category::Prefix).count() + o.annotation.events_of(Category::Internal).count();
        for k in keys {
            let acc = groups.entry(k).or_default();
            acc.poems += 1;
            acc.events += events;
            acc.prefix.extend(&prefix);
            acc.internal.extend(&internal);
        }
    }
    let mut rows = Vec::new();
    for (value, acc) in groups {
        if dim == Dimension::Tag && acc.poems < tag_min {
            coverage.below_minimum.push(value.to_string());
            continue;
        }
        rows.push(StatRow {
            group: GroupKey { dimension: dim, value },
            n_poems: acc.poems,
            mean_prefix_len: mean(&acc.prefix),
            mean_internal_len: mean(&acc.internal),
            nonstandard_event_count: acc.events,
            prefix_n: acc.prefix.len(),
            internal_n: acc.internal.len(),
            ci95_prefix: ci95(&acc.prefix),
            ci95_internal: ci95(&acc.internal),
        });
    }
    if coverage.missing > 0 {
        log::warn!("{} of {} poems have no {dim}; excluded", coverage.missing, coverage.poems);
    }
    GroupTable { dimension: dim, mode, rows, coverage }
}

/// Per-decade means of event lengths, keyed by the poet's birth decade.
pub fn temporal_trend(obs: &[Observation<'_>]) -> GroupTable {
    mean_whitespace_by_group(obs, Dimension::BirthDecade, Mode::PerNonstandardEvent, 0)
}

fn punct_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\p{P}$").expect("valid pattern"))
}

pub fn is_punctuation(c: char) -> bool {
    let mut buf = [0u8; 4];
    punct_regex().is_match(c.encode_utf8(&mut buf))
}

/// The punctuation character a line ends on, if any.
pub fn line_final_punct(line: &str) -> Option<char> {
    line.chars().rev().find(|&c| text::is_visible(c)).filter(|&c| is_punctuation(c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PunctRow {
    pub token: String,
    /// Lines ending in the token.
    pub count: usize,
    /// Lines in the form (line-end table) or occurrences of the token
    /// anywhere (usage table).
    pub total: usize,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PunctTable {
    pub form: String,
    pub poems: usize,
    pub lines: usize,
    /// Share of lines ending in each token.
    pub line_end: Vec<PunctRow>,
    /// Share of each token's occurrences that fall at a line end.
    pub usage: Vec<PunctRow>,
}

#[derive(Default)]
struct PunctCounts {
    poems: usize,
    lines: usize,
    at_end: BTreeMap<char, usize>,
    anywhere: BTreeMap<char, usize>,
}

fn ranked(mut rows: Vec<PunctRow>, top_k: Option<usize>) -> Vec<PunctRow> {
    rows.sort_by(|a, b| {
        let lhs = a.count as u128 * b.total as u128;
        let rhs = b.count as u128 * a.total as u128;
        rhs.cmp(&lhs).then_with(|| a.token.cmp(&b.token))
    });
    if let Some(k) = top_k {
        rows.truncate(k);
    }
    rows
}

fn row(token: char, count: usize, total: usize) -> PunctRow {
    let share = if total == 0 { 0.0 } else { count as f64 / total as f64 };
    PunctRow { token: token.to_string(), count, total, share }
}

/// Line-final punctuation per form. Poems without a form are skipped.
/// `forms` restricts the output; `punct_min_count` applies to the usage
/// table only.
pub fn punctuation_line_end_table(
    poems: &[Poem],
    forms: Option<&[String]>,
    punct_min_count: usize,
    top_k: Option<usize>,
) -> Vec<PunctTable> {
    let wanted: Option<BTreeSet<&str>> = forms.map(|f| f.iter().map(String::as_str).collect());
    let mut by_form: BTreeMap<&str, PunctCounts> = BTreeMap::new();
    for p in poems {
        let Some(form) = p.form.as_deref() else { continue };
        if wanted.as_ref().is_some_and(|w| !w.contains(form)) {
            continue;
        }
        let c = by_form.entry(form).or_default();
        c.poems += 1;
        for line in p.lines().into_iter().filter(|l| !text::is_blank(l)) {
            c.lines += 1;
            if let Some(t) = line_final_punct(line) {
                *c.at_end.entry(t).or_default() += 1;
            }
            for ch in line.chars().filter(|&ch| is_punctuation(ch)) {
                *c.anywhere.entry(ch).or_default() += 1;
            }
        }
    }
    by_form
        .into_iter()
        .map(|(form, c)| {
            let line_end = c.at_end.iter().map(|(&t, &n)| row(t, n, c.lines)).collect();
            let usage = c
                .anywhere
                .iter()
                .filter(|(_, &total)| total >= punct_min_count)
                .map(|(&t, &total)| row(t, c.at_end.get(&t).copied().unwrap_or(0), total))
                .collect();
            PunctTable {
                form: form.to_string(),
                poems: c.poems,
                lines: c.lines,
                line_end: ranked(line_end, top_k),
                usage: ranked(usage, top_k),
            }
        })
        .collect()
}

/// Nearest-rank percentile of an ascending slice: the smallest value with
/// at least `p` percent of the samples at or below it.
pub fn nearest_rank(sorted: &[usize], p: u32) -> Option<usize> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len() as u64;
    let rank = (u64::from(p) * n).div_ceil(100).max(1).min(n);
    Some(sorted[(rank - 1) as usize])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagRow {
    pub tag: String,
    pub n_poems: usize,
    /// Poems with at least one event longer than the percentile.
    pub n_high: usize,
    pub proportion: f64,
    /// Poet of the tag's poem with the longest event.
    pub high_example: Option<String>,
    /// Poet of the tag's poem with the shortest longest event.
    pub low_example: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagTable {
    pub ws_type: Category,
    pub percentile: Option<usize>,
    pub lengths: usize,
    pub descending: Vec<TagRow>,
    pub ascending: Vec<TagRow>,
    pub below_minimum: Vec<String>,
}

pub const HIGH_USAGE_PERCENTILE: u32 = 75;

/// Tags ranked by the share of their poems that use whitespace of
/// `ws_type` longer than the corpus-wide 75th percentile of event lengths.
pub fn high_usage_tags(obs: &[Observation<'_>], ws_type: Category, tag_min: usize) -> Result<TagTable, StatsError> {
    if !matches!(ws_type, Category::Prefix | Category::Internal) {
        return Err(StatsError::UnsupportedType(ws_type));
    }
    let longest: Vec<Option<usize>> = obs
        .iter()
        .map(|o| o.annotation.events_of(ws_type).filter_map(|e| e.length).max())
        .collect();
    let mut all: Vec<usize> =
        obs.iter().flat_map(|o| o.annotation.events_of(ws_type).filter_map(|e| e.length)).collect();
    all.sort_unstable();
    let pct = nearest_rank(&all, HIGH_USAGE_PERCENTILE);

    let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, o) in obs.iter().enumerate() {
        for t in &o.poem.tags {
            members.entry(t.as_str()).or_default().push(i);
        }
    }
    let mut rows = Vec::new();
    let mut below_minimum = Vec::new();
    for (tag, idx) in members {
        if idx.len() < tag_min {
            below_minimum.push(tag.to_string());
            continue;
        }
        let n_high = idx.iter().filter(|&&i| matches!((longest[i], pct), (Some(m), Some(p)) if m > p)).count();
        let score = |i: usize| longest[i].unwrap_or(0);
        let example = |i: &usize| (!obs[*i].poem.poet.is_empty()).then(|| obs[*i].poem.poet.clone());
        let high = idx.iter().max_by(|&&a, &&b| score(a).cmp(&score(b)).then_with(|| b.cmp(&a)));
        let low = idx.iter().min_by(|&&a, &&b| score(a).cmp(&score(b)).then_with(|| a.cmp(&b)));
        rows.push(TagRow {
            tag: tag.to_string(),
            n_poems: idx.len(),
            n_high,
            proportion: n_high as f64 / idx.len() as f64,
            high_example: high.and_then(example),
            low_example: low.and_then(example),
        });
    }
    let by_share = |a: &TagRow, b: &TagRow| (a.n_high as u128 * b.n_poems as u128).cmp(&(b.n_high as u128 * a.n_poems as u128));
    let mut descending = rows.clone();
    descending.sort_by(|a, b| by_share(b, a).then_with(|| a.tag.cmp(&b.tag)));
    let mut ascending = rows;
    ascending.sort_by(|a, b| by_share(a, b).then_with(|| a.tag.cmp(&b.tag)));
    Ok(TagTable { ws_type, percentile: pct, lengths: all.len(), descending, ascending, below_minimum })
}

/// Flat rows for an external plotting tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlotData {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// One row per event of `category`: form, poem id, length. For box plots.
pub fn lengths_by_form(obs: &[Observation<'_>], category: Category) -> PlotData {
    let mut rows = Vec::new();
    for o in obs {
        let Some(form) = &o.poem.form else { continue };
        for e in o.annotation.events_of(category) {
            rows.push(vec![form.clone(), o.poem.id.clone(), e.length.unwrap_or(0).to_string()]);
        }
    }
    PlotData {
        name: format!("{}_lengths_by_form", category.as_str().to_lowercase()),
        header: vec!["form".into(), "poem_id".into(), "length".into()],
        rows,
    }
}

/// Long-format means with intervals, one row per group and category.
pub fn group_means(table: &GroupTable) -> PlotData {
    let mut rows = Vec::new();
    for r in &table.rows {
        let series = [
            ("PREFIX", r.mean_prefix_len, r.ci95_prefix, r.prefix_n),
            ("INTERNAL", r.mean_internal_len, r.ci95_internal, r.internal_n),
        ];
        for (cat, m, ci, n) in series {
            rows.push(vec![
                r.group.value.to_string(),
                cat.to_string(),
                opt(m),
                opt(ci.map(|c| c.0)),
                opt(ci.map(|c| c.1)),
                n.to_string(),
                r.n_poems.to_string(),
            ]);
        }
    }
    PlotData {
        name: format!("means_by_{}_{}", table.dimension, table.mode.as_str()),
        header: ["group", "category", "mean", "ci_low", "ci_high", "n_values", "n_poems"]
            .map(String::from)
            .to_vec(),
        rows,
    }
}
