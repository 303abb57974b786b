//! Shared domain types: poems, the whitespace taxonomy, events and annotations.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::text;
use crate::typography::{canonicalize_whitespace, WidthTable};

pub const TAB_WIDTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Published,
    Unpublished,
    Generated,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Published => "published",
            Source::Unpublished => "unpublished",
            Source::Generated => "generated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poem {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub poet: String,
    #[serde(default)]
    pub poet_birth_year: Option<i32>,
    #[serde(default)]
    pub form: Option<String>,
    #[serde(default)]
    pub tags: BTreeSet<String>,
    pub source: Source,
    pub body: String,
}

impl Poem {
    /// A poem with empty metadata and a canonicalized body.
    pub fn new(id: impl Into<String>, source: Source, body: &str) -> Poem {
        Poem {
            id: id.into(),
            title: String::new(),
            poet: String::new(),
            poet_birth_year: None,
            form: None,
            tags: BTreeSet::new(),
            source,
            body: normalize_body(body),
        }
    }

    pub fn lines(&self) -> Vec<&str> {
        text::lines(&self.body)
    }
}

/// Ingestion normalization: LF line endings, tabs expanded, ASCII spaces only.
pub fn normalize_body(body: &str) -> String {
    canonicalize_whitespace(body, &WidthTable::default(), TAB_WIDTH)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    #[default]
    JsonLines,
}

impl FromStr for CorpusFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, CorpusError> {
        match s {
            "jsonl" | "json-lines" | "jsonlines" => Ok(CorpusFormat::JsonLines),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("record {index} (line {line}): field `{field}`: {message}")]
    Record {
        index: usize,
        line: usize,
        field: String,
        message: String,
    },
    #[error("record {index} (line {line}): duplicate id {id:?}")]
    DuplicateId { index: usize, line: usize, id: String },
    #[error("unknown corpus format {0:?}")]
    UnknownFormat(String),
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Vec<Poem>, CorpusError> {
    let path = path.as_ref();
    let io_err = |source| CorpusError::Io { path: path.display().to_string(), source };
    let file = File::open(path).map_err(io_err)?;
    match format {
        CorpusFormat::JsonLines => read_corpus(BufReader::new(file)).map_err(|e| match e {
            CorpusError::Io { source, .. } => io_err(source),
            e => e,
        }),
    }
}

/// JSON Lines corpus reader. Blank lines are skipped and do not count as records.
pub fn read_corpus(reader: impl BufRead) -> Result<Vec<Poem>, CorpusError> {
    let mut poems = Vec::new();
    let mut seen = HashSet::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io { path: "<corpus>".into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let index = poems.len();
        let mut de = serde_json::Deserializer::from_str(&line);
        let mut poem: Poem = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            let message = inner.to_string();
            CorpusError::Record {
                index,
                line: n + 1,
                field: missing_field(&message).unwrap_or(field),
                message,
            }
        })?;
        poem.body = normalize_body(&poem.body);
        if !seen.insert(poem.id.clone()) {
            return Err(CorpusError::DuplicateId { index, line: n + 1, id: poem.id });
        }
        poems.push(poem);
    }
    Ok(poems)
}

// serde reports missing fields at the parent path
fn missing_field(message: &str) -> Option<String> {
    let rest = message.strip_prefix("missing field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    LineBreak,
    Prefix,
    Internal,
    Vertical,
    LineLength,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::LineBreak,
        Category::Prefix,
        Category::Internal,
        Category::Vertical,
        Category::LineLength,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::LineBreak => "LINE_BREAK",
            Category::Prefix => "PREFIX",
            Category::Internal => "INTERNAL",
            Category::Vertical => "VERTICAL",
            Category::LineLength => "LINE_LENGTH",
        }
    }

    pub fn subcategories(self) -> &'static [Subcategory] {
        use Subcategory::*;
        match self {
            Category::LineBreak => &[Standard, Lexical, Clausal, Phrasal, EnjambedUnknown],
            Category::Prefix => &[Standard, StandardIndent, NonStandard],
            Category::Internal => &[Standard, NonStandard],
            Category::Vertical => &[Standard, StandardStanza, NonStandard],
            Category::LineLength => &[Standard, NonStandard],
        }
    }

    /// Events of these categories carry a span within their line.
    pub fn has_span(self) -> bool {
        matches!(self, Category::Prefix | Category::Internal)
    }

    pub fn has_length(self) -> bool {
        matches!(self, Category::Prefix | Category::Internal | Category::Vertical)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, TaxonomyError> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| TaxonomyError::UnknownCategory(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcategory {
    Standard,
    Lexical,
    Clausal,
    Phrasal,
    EnjambedUnknown,
    StandardIndent,
    StandardStanza,
    NonStandard,
}

impl Subcategory {
    pub fn as_str(self) -> &'static str {
        match self {
            Subcategory::Standard => "standard",
            Subcategory::Lexical => "lexical",
            Subcategory::Clausal => "clausal",
            Subcategory::Phrasal => "phrasal",
            Subcategory::EnjambedUnknown => "enjambed_unknown",
            Subcategory::StandardIndent => "standard_indent",
            Subcategory::StandardStanza => "standard_stanza",
            Subcategory::NonStandard => "non_standard",
        }
    }

    pub fn is_enjambed(self) -> bool {
        matches!(
            self,
            Subcategory::Lexical | Subcategory::Clausal | Subcategory::Phrasal | Subcategory::EnjambedUnknown
        )
    }
}

impl fmt::Display for Subcategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaxonomyError {
    #[error("subcategory {sub} is not valid for {category}")]
    InvalidPair { category: Category, sub: Subcategory },
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
}

/// A (category, subcategory) pair that is valid by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawWispCategory", into = "RawWispCategory")]
pub struct WispCategory {
    category: Category,
    subcategory: Subcategory,
}

#[derive(Serialize, Deserialize)]
struct RawWispCategory {
    category: Category,
    subcategory: Subcategory,
}

impl TryFrom<RawWispCategory> for WispCategory {
    type Error = TaxonomyError;

    fn try_from(raw: RawWispCategory) -> Result<Self, TaxonomyError> {
        WispCategory::new(raw.category, raw.subcategory)
    }
}

impl From<WispCategory> for RawWispCategory {
    fn from(c: WispCategory) -> Self {
        RawWispCategory { category: c.category, subcategory: c.subcategory }
    }
}

impl WispCategory {
    pub fn new(category: Category, subcategory: Subcategory) -> Result<Self, TaxonomyError> {
        if category.subcategories().contains(&subcategory) {
            Ok(WispCategory { category, subcategory })
        } else {
            Err(TaxonomyError::InvalidPair { category, sub: subcategory })
        }
    }

    pub fn category(self) -> Category {
        self.category
    }

    pub fn subcategory(self) -> Subcategory {
        self.subcategory
    }

    pub fn all() -> Vec<WispCategory> {
        Category::ALL
            .iter()
            .flat_map(|&c| c.subcategories().iter().map(move |&s| WispCategory { category: c, subcategory: s }))
            .collect()
    }

    pub fn is_standard(self) -> bool {
        matches!(
            self.subcategory,
            Subcategory::Standard | Subcategory::StandardIndent | Subcategory::StandardStanza
        )
    }
}

impl fmt::Display for WispCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.category, self.subcategory)
    }
}

/// One whitespace occurrence. Spans are char offsets within the line,
/// half-open.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEvent", into = "RawEvent")]
pub struct WhitespaceEvent {
    pub kind: WispCategory,
    pub line_index: usize,
    pub char_span: Option<(usize, usize)>,
    pub length: Option<usize>,
    pub detail: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawEvent {
    category: Category,
    subcategory: Subcategory,
    line_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    char_span: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl TryFrom<RawEvent> for WhitespaceEvent {
    type Error = TaxonomyError;

    fn try_from(r: RawEvent) -> Result<Self, TaxonomyError> {
        Ok(WhitespaceEvent {
            kind: WispCategory::new(r.category, r.subcategory)?,
            line_index: r.line_index,
            char_span: r.char_span,
            length: r.length,
            detail: r.detail,
        })
    }
}

impl From<WhitespaceEvent> for RawEvent {
    fn from(e: WhitespaceEvent) -> Self {
        RawEvent {
            category: e.kind.category,
            subcategory: e.kind.subcategory,
            line_index: e.line_index,
            char_span: e.char_span,
            length: e.length,
            detail: e.detail,
        }
    }
}

impl WhitespaceEvent {
    pub fn category(&self) -> Category {
        self.kind.category()
    }

    pub fn subcategory(&self) -> Subcategory {
        self.kind.subcategory()
    }

    /// Ordering key: line, span start (spanless first), category.
    pub fn sort_key(&self) -> (usize, Option<usize>, Category) {
        (self.line_index, self.char_span.map(|s| s.0), self.category())
    }

    /// Tab-separated row: poem, category, subcategory, line, span, length,
    /// detail. Absent fields are written as `-`.
    pub fn tsv_row(&self, poem_id: &str) -> String {
        let span = self.char_span.map_or("-".to_string(), |(s, e)| format!("{s},{e}"));
        let length = self.length.map_or("-".to_string(), |n| n.to_string());
        format!(
            "{poem_id}\t{}\t{}\t{}\t{span}\t{length}\t{}",
            self.category(),
            self.subcategory(),
            self.line_index,
            self.detail.as_deref().unwrap_or("-")
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub count: usize,
    pub total_length: usize,
    pub mean_length: Option<f64>,
    pub by_subcategory: BTreeMap<Subcategory, usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary(pub BTreeMap<Category, CategoryStats>);

impl Summary {
    pub fn from_events(events: &[WhitespaceEvent]) -> Summary {
        let mut map: BTreeMap<Category, CategoryStats> = BTreeMap::new();
        for e in events {
            let s = map.entry(e.category()).or_default();
            s.count += 1;
            s.total_length += e.length.unwrap_or(0);
            *s.by_subcategory.entry(e.subcategory()).or_default() += 1;
        }
        for (cat, s) in map.iter_mut() {
            if cat.has_length() && s.count > 0 {
                s.mean_length = Some(s.total_length as f64 / s.count as f64);
            }
        }
        Summary(map)
    }

    pub fn get(&self, c: Category) -> Option<&CategoryStats> {
        self.0.get(&c)
    }

    pub fn count(&self, c: Category) -> usize {
        self.0.get(&c).map_or(0, |s| s.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WispAnnotation {
    pub poem_id: String,
    pub events: Vec<WhitespaceEvent>,
    pub line_count: usize,
    pub summary: Summary,
}

impl WispAnnotation {
    /// Sorts events and recomputes the summary.
    pub fn new(poem_id: impl Into<String>, mut events: Vec<WhitespaceEvent>, line_count: usize) -> Self {
        events.sort_by_key(|e| e.sort_key());
        let summary = Summary::from_events(&events);
        WispAnnotation { poem_id: poem_id.into(), events, line_count, summary }
    }

    pub fn events_of(&self, c: Category) -> impl Iterator<Item = &WhitespaceEvent> {
        self.events.iter().filter(move |e| e.category() == c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    PoemIdMismatch { annotation: String, poem: String },
    LineCount { expected: usize, found: usize },
    LineOutOfRange { event: usize, line_index: usize },
    SpanOutOfBounds { event: usize, span: (usize, usize), line_len: usize },
    MissingSpan { event: usize },
    UnexpectedSpan { event: usize },
    BadLength { event: usize, length: Option<usize> },
    SpanLengthMismatch { event: usize, span: (usize, usize), length: usize },
    SpanNotSpaces { event: usize },
    Unsorted { event: usize },
    SummaryMismatch { category: Category, expected: usize, found: usize },
    SummaryLengthMismatch { category: Category },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            PoemIdMismatch { annotation, poem } => write!(f, "annotation is for {annotation:?}, poem is {poem:?}"),
            LineCount { expected, found } => write!(f, "line_count {found}, body has {expected} lines"),
            LineOutOfRange { event, line_index } => write!(f, "event {event}: line {line_index} out of range"),
            SpanOutOfBounds { event, span, line_len } => {
                write!(f, "event {event}: span {span:?} exceeds line length {line_len}")
            }
            MissingSpan { event } => write!(f, "event {event}: span required"),
            UnexpectedSpan { event } => write!(f, "event {event}: span not allowed for this category"),
            BadLength { event, length } => write!(f, "event {event}: invalid length {length:?}"),
            SpanLengthMismatch { event, span, length } => {
                write!(f, "event {event}: span {span:?} does not hold {length} chars")
            }
            SpanNotSpaces { event } => write!(f, "event {event}: span covers non-space characters"),
            Unsorted { event } => write!(f, "event {event}: out of order"),
            SummaryMismatch { category, expected, found } => {
                write!(f, "summary {category}: count {found}, events give {expected}")
            }
            SummaryLengthMismatch { category } => write!(f, "summary {category}: lengths disagree with events"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_annotation(a: &WispAnnotation, p: &Poem) -> ValidationReport {
    let mut v = Vec::new();
    if a.poem_id != p.id {
        v.push(Violation::PoemIdMismatch { annotation: a.poem_id.clone(), poem: p.id.clone() });
    }
    let lines = p.lines();
    if a.line_count != lines.len() {
        v.push(Violation::LineCount { expected: lines.len(), found: a.line_count });
    }
    for (i, e) in a.events.iter().enumerate() {
        if i > 0 && a.events[i - 1].sort_key() > e.sort_key() {
            v.push(Violation::Unsorted { event: i });
        }
        let cat = e.category();
        let length_ok = match e.length {
            Some(n) => cat.has_length() && n >= 1,
            None => !cat.has_length(),
        };
        if !length_ok {
            v.push(Violation::BadLength { event: i, length: e.length });
        }
        // line-length events are poem-level and anchored at line 0
        let Some(line) = lines.get(e.line_index) else {
            if !(cat == Category::LineLength && e.line_index == 0) {
                v.push(Violation::LineOutOfRange { event: i, line_index: e.line_index });
            }
            continue;
        };
        match (cat.has_span(), e.char_span) {
            (true, None) => v.push(Violation::MissingSpan { event: i }),
            (false, Some(_)) => v.push(Violation::UnexpectedSpan { event: i }),
            (true, Some(span)) => {
                let chars: Vec<char> = line.chars().collect();
                if span.0 > span.1 || span.1 > chars.len() {
                    v.push(Violation::SpanOutOfBounds { event: i, span, line_len: chars.len() });
                } else {
                    if let Some(n) = e.length {
                        if span.1 - span.0 != n {
                            v.push(Violation::SpanLengthMismatch { event: i, span, length: n });
                        }
                    }
                    if chars[span.0..span.1].iter().any(|&c| c != ' ') {
                        v.push(Violation::SpanNotSpaces { event: i });
                    }
                }
            }
            (false, None) => {}
        }
        if cat == Category::Vertical {
            if let Some(n) = e.length {
                let blank = lines.iter().skip(e.line_index).take_while(|l| text::is_blank(l)).count();
                if blank != n {
                    v.push(Violation::BadLength { event: i, length: e.length });
                }
            }
        }
    }
    let expected = Summary::from_events(&a.events);
    for c in Category::ALL {
        let (want, got) = (expected.get(c), a.summary.get(c));
        let (wc, gc) = (want.map_or(0, |s| s.count), got.map_or(0, |s| s.count));
        if wc != gc {
            v.push(Violation::SummaryMismatch { category: c, expected: wc, found: gc });
        } else if let (Some(w), Some(g)) = (want, got) {
            if w.total_length != g.total_length || w.by_subcategory != g.by_subcategory {
                v.push(Violation::SummaryLengthMismatch { category: c });
            }
        }
    }
    ValidationReport { violations: v }
}
