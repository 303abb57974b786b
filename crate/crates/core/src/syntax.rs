//! CoNLL-U ingestion, token-to-line alignment, enjambment subtypes and
//! dependency triples across line breaks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::AnnotatorConfig;
use crate::model::{Poem, Subcategory};
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based index within its sentence.
    pub id: usize,
    pub form: String,
    pub upos: String,
    /// 0 for the root, otherwise a 1-based index in the same sentence.
    pub head: usize,
    pub deprel: String,
    pub sentence: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntaxDoc {
    pub poem_id: String,
    pub tokens: Vec<Token>,
}

impl SyntaxDoc {
    /// Global index of token `i`'s head, `None` for roots.
    pub fn head_of(&self, i: usize) -> Option<usize> {
        let t = &self.tokens[i];
        (t.head != 0).then(|| i + 1 - t.id + t.head - 1)
    }

    /// All (head, dependent) arcs as global token indices.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.tokens.len()).filter_map(|d| self.head_of(d).map(|h| (h, d)))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SyntaxError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn malformed(line: usize, message: impl Into<String>) -> SyntaxError {
    SyntaxError::Malformed { line, message: message.into() }
}

pub fn parse_conllu(path: impl AsRef<Path>) -> Result<SyntaxDoc, SyntaxError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| SyntaxError::Io { path: path.display().to_string(), source })?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_conllu_str(&text, &stem)
}

/// Parses CoNLL-U text. The poem id comes from a `# poem_id = ...` comment
/// when present, else `default_id`.
pub fn parse_conllu_str(input: &str, default_id: &str) -> Result<SyntaxDoc, SyntaxError> {
    let mut poem_id = None;
    let mut tokens = Vec::new();
    let mut sentence = 0;
    // (line number, head) of the open sentence, checked when it closes
    let mut pending: Vec<(usize, usize)> = Vec::new();

    let close = |pending: &mut Vec<(usize, usize)>| -> Result<(), SyntaxError> {
        let n = pending.len();
        for &(line, head) in pending.iter() {
            if head > n {
                return Err(malformed(line, format!("head {head} outside sentence of {n} words")));
            }
        }
        pending.clear();
        Ok(())
    };

    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !pending.is_empty() {
                close(&mut pending)?;
                sentence += 1;
            }
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                if k.trim() == "poem_id" {
                    poem_id = Some(v.trim().to_string());
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(malformed(line_no, format!("expected 10 tab-separated columns, found {}", cols.len())));
        }
        // multiword ranges and empty nodes carry no dependency of their own
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: usize = cols[0].parse().map_err(|_| malformed(line_no, format!("bad ID {:?}", cols[0])))?;
        if id != pending.len() + 1 {
            return Err(malformed(line_no, format!("ID {id} out of sequence, expected {}", pending.len() + 1)));
        }
        let head: usize = cols[6].parse().map_err(|_| malformed(line_no, format!("bad HEAD {:?}", cols[6])))?;
        if head == id {
            return Err(malformed(line_no, "token is its own head"));
        }
        pending.push((line_no, head));
        tokens.push(Token {
            id,
            form: cols[1].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
            sentence,
        });
    }
    close(&mut pending)?;
    Ok(SyntaxDoc { poem_id: poem_id.unwrap_or_else(|| default_id.to_string()), tokens })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    /// Line holding each token's first visible char.
    pub line_of: Vec<usize>,
    pub end_line: Vec<usize>,
    pub split: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("tokens diverge from poem text at visible offset {offset}: poem has {expected:?}, tokens have {found:?}")]
pub struct AlignmentError {
    pub offset: usize,
    pub expected: Option<char>,
    pub found: Option<char>,
}

/// Greedy left-to-right match of token chars against the poem's visible
/// chars. Tokens with no visible chars (e.g. SPACE) take the line of the
/// next visible char.
pub fn align_tokens_to_lines(doc: &SyntaxDoc, poem: &Poem) -> Result<Alignment, AlignmentError> {
    let stream: Vec<(char, usize)> = poem
        .lines()
        .iter()
        .enumerate()
        .flat_map(|(li, l)| text::visible_chars(l).map(move |c| (c, li)).collect::<Vec<_>>())
        .collect();
    let last_line = stream.last().map_or(0, |s| s.1);
    let mut pos = 0;
    let mut a = Alignment { line_of: Vec::new(), end_line: Vec::new(), split: Vec::new() };
    for tok in &doc.tokens {
        let (mut first, mut last) = (None, None);
        for c in text::visible_chars(&tok.form) {
            match stream.get(pos) {
                Some(&(p, li)) if p == c => {
                    first.get_or_insert(li);
                    last = Some(li);
                    pos += 1;
                }
                other => {
                    return Err(AlignmentError { offset: pos, expected: other.map(|s| s.0), found: Some(c) })
                }
            }
        }
        let here = stream.get(pos).map_or(last_line, |s| s.1);
        let first = first.unwrap_or(here);
        let last = last.unwrap_or(first);
        a.line_of.push(first);
        a.end_line.push(last);
        a.split.push(first != last);
    }
    if pos < stream.len() {
        return Err(AlignmentError { offset: pos, expected: Some(stream[pos].0), found: None });
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enjambment {
    pub subcategory: Subcategory,
    pub detail: Option<String>,
}

fn base_rel(deprel: &str) -> &str {
    deprel.split(':').next().unwrap_or(deprel)
}

fn is_nominal(upos: &str) -> bool {
    matches!(upos, "NOUN" | "PROPN" | "PRON")
}

fn is_verbal(upos: &str) -> bool {
    matches!(upos, "VERB" | "AUX")
}

/// An arc crosses the break after `line` when its ends straddle it,
/// regardless of direction.
fn crosses(a: &Alignment, h: usize, d: usize, line: usize) -> bool {
    let (lo, hi) = (a.line_of[h].min(a.line_of[d]), a.line_of[h].max(a.line_of[d]));
    lo <= line && line < hi
}

/// Subtype of the enjambed break that follows `break_line`.
pub fn classify_enjambment(
    break_line: usize,
    doc: &SyntaxDoc,
    alignment: &Alignment,
    clausal: &BTreeSet<String>,
) -> Enjambment {
    for (i, tok) in doc.tokens.iter().enumerate() {
        if alignment.line_of[i] <= break_line && break_line < alignment.end_line[i] {
            return Enjambment { subcategory: Subcategory::Lexical, detail: Some(tok.form.clone()) };
        }
    }
    let crossing: Vec<(usize, usize)> = doc.arcs().filter(|&(h, d)| crosses(alignment, h, d, break_line)).collect();
    for &(h, d) in &crossing {
        let (ht, dt) = (&doc.tokens[h], &doc.tokens[d]);
        let nominal_verb = (is_nominal(&dt.upos) && is_verbal(&ht.upos)) || (is_verbal(&dt.upos) && is_nominal(&ht.upos));
        if clausal.contains(base_rel(&dt.deprel)) && nominal_verb {
            return Enjambment { subcategory: Subcategory::Clausal, detail: Some(dt.deprel.clone()) };
        }
    }
    match crossing.first() {
        Some(&(_, d)) => {
            Enjambment { subcategory: Subcategory::Phrasal, detail: Some(doc.tokens[d].deprel.clone()) }
        }
        None => Enjambment { subcategory: Subcategory::Phrasal, detail: Some("adjacency-only".into()) },
    }
}

/// Lines followed by an enjambed break: nonblank, not the last nonblank
/// line, not sentence-final.
pub fn enjambed_breaks(lines: &[&str], cfg: &AnnotatorConfig) -> Vec<usize> {
    let nonblank: Vec<usize> = (0..lines.len()).filter(|&i| !text::is_blank(lines[i])).collect();
    let Some((_, init)) = nonblank.split_last() else { return Vec::new() };
    init.iter().copied().filter(|&i| !cfg.ends_sentence(lines[i])).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpanningTriple {
    pub head_pos: String,
    pub dep_pos: String,
    pub relation: String,
    pub count: usize,
}

/// Triple counts keyed by (head POS, dependent POS, relation).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleCounts(pub BTreeMap<(String, String, String), usize>);

impl TripleCounts {
    pub fn add(&mut self, head_pos: &str, dep_pos: &str, relation: &str, n: usize) {
        *self.0.entry((head_pos.to_string(), dep_pos.to_string(), relation.to_string())).or_default() += n;
    }

    pub fn merge(&mut self, other: &TripleCounts) {
        for ((h, d, r), n) in &other.0 {
            self.add(h, d, r, *n);
        }
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    /// Descending by count, then by key.
    pub fn ranked(&self) -> Vec<SpanningTriple> {
        let mut v: Vec<SpanningTriple> = self
            .0
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|((h, d, r), &n)| SpanningTriple { head_pos: h.clone(), dep_pos: d.clone(), relation: r.clone(), count: n })
            .collect();
        v.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.cmp(b)));
        v
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("head_pos\tdep_pos\trelation\tcount\n");
        for t in self.ranked() {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", t.head_pos, t.dep_pos, t.relation, t.count);
        }
        out
    }
}

/// Counts every arc that crosses at least one enjambed break, once.
pub fn spanning_triples(poem: &Poem, doc: &SyntaxDoc, alignment: &Alignment, cfg: &AnnotatorConfig) -> TripleCounts {
    let lines = poem.lines();
    let breaks = enjambed_breaks(&lines, cfg);
    let mut counts = TripleCounts::default();
    for (h, d) in doc.arcs() {
        if breaks.iter().any(|&b| crosses(alignment, h, d, b)) {
            let (ht, dt) = (&doc.tokens[h], &doc.tokens[d]);
            counts.add(&ht.upos, &dt.upos, &dt.deprel, 1);
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Source;

    const HI: &str = "# text = Hi there\n1\tHi\thi\tINTJ\t_\t_\t0\troot\t_\t_\n2\tthere\tthere\tADV\t_\t_\t1\tadvmod\t_\t_\n\n";

    #[test]
    fn two_token_sentence() {
        let doc = parse_conllu_str(HI, "p").unwrap();
        assert_eq!(doc.poem_id, "p");
        assert_eq!(doc.tokens.len(), 2);
        assert_eq!(doc.head_of(0), None);
        assert_eq!(doc.head_of(1), Some(0));
    }

    #[test]
    fn multiword_ranges_expand_to_words() {
        let s = "# poem_id = q\n1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n1\tde\tde\tADP\t_\t_\t2\tcase\t_\t_\n2\tel\tel\tDET\t_\t_\t0\troot\t_\t_\n2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n";
        let doc = parse_conllu_str(s, "p").unwrap();
        assert_eq!(doc.poem_id, "q");
        assert_eq!(doc.tokens.iter().map(|t| t.form.as_str()).collect::<Vec<_>>(), ["de", "el"]);
    }

    #[test]
    fn truncated_line_reports_line_number() {
        let s = "1\tHi\thi\tINTJ\t_\t_\t0\troot\t_\t_\n2\tthere\tthere\tADV\n";
        match parse_conllu_str(s, "p") {
            Err(SyntaxError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn head_outside_sentence_rejected() {
        let s = "1\tHi\thi\tINTJ\t_\t_\t0\troot\t_\t_\n2\tthere\tthere\tADV\t_\t_\t7\tadvmod\t_\t_\n";
        assert!(matches!(parse_conllu_str(s, "p"), Err(SyntaxError::Malformed { line: 2, .. })));
    }

    #[test]
    fn sentences_restart_ids() {
        let doc = parse_conllu_str(&format!("{HI}{HI}"), "p").unwrap();
        assert_eq!(doc.tokens[3].sentence, 1);
        assert_eq!(doc.head_of(3), Some(2));
    }

    #[test]
    fn alignment_one_line_and_split() {
        let doc = parse_conllu_str(HI, "p").unwrap();
        let poem = Poem::new("p", Source::Published, "Hi there\n");
        let a = align_tokens_to_lines(&doc, &poem).unwrap();
        assert_eq!(a.line_of, vec![0, 0]);

        let poem = Poem::new("p", Source::Published, "Hi the-\nre\n");
        let doc = SyntaxDoc {
            poem_id: "p".into(),
            tokens: vec![
                Token { id: 1, form: "Hi".into(), upos: "INTJ".into(), head: 0, deprel: "root".into(), sentence: 0 },
                Token { id: 2, form: "the-re".into(), upos: "ADV".into(), head: 1, deprel: "advmod".into(), sentence: 0 },
            ],
        };
        let a = align_tokens_to_lines(&doc, &poem).unwrap();
        assert_eq!(a.line_of, vec![0, 0]);
        assert_eq!(a.end_line, vec![0, 1]);
        assert_eq!(a.split, vec![false, true]);
        let e = classify_enjambment(0, &doc, &a, &AnnotatorConfig::default().clausal_relations);
        assert_eq!(e.subcategory, Subcategory::Lexical);
    }

    #[test]
    fn alignment_mismatch_reports_offset() {
        let doc = parse_conllu_str(HI, "p").unwrap();
        let poem = Poem::new("p", Source::Published, "Hi where\n");
        assert_eq!(
            align_tokens_to_lines(&doc, &poem),
            Err(AlignmentError { offset: 2, expected: Some('w'), found: Some('t') })
        );
        let poem = Poem::new("p", Source::Published, "Hi there!\n");
        assert_eq!(align_tokens_to_lines(&doc, &poem).unwrap_err().offset, 7);
    }
}
