//! Exhaustive enumeration of dependency arcs crossing an enjambed break.

use std::collections::BTreeMap;

use wisp_core::syntax::SyntaxDoc;
use wisp_core::Poem;

pub type Key = (String, String, String);

/// Line of every token, found by walking the poem's non-space characters.
fn token_lines(poem: &Poem, doc: &SyntaxDoc) -> Vec<usize> {
    let mut chars = Vec::new();
    for (i, l) in poem.lines().iter().enumerate() {
        chars.extend(l.chars().filter(|c| !c.is_whitespace()).map(|c| (c, i)));
    }
    let mut k = 0;
    doc.tokens
        .iter()
        .map(|t| {
            let n = t.form.chars().count();
            assert_eq!(chars[k..k + n].iter().map(|c| c.0).collect::<String>(), t.form);
            let line = chars[k].1;
            k += n;
            line
        })
        .collect()
}

pub fn triples(poem: &Poem, doc: &SyntaxDoc) -> BTreeMap<Key, usize> {
    let lines = poem.lines();
    let content: Vec<usize> = (0..lines.len()).filter(|&i| !lines[i].trim().is_empty()).collect();
    let breaks: Vec<usize> = content[..content.len() - 1]
        .iter()
        .copied()
        .filter(|&i| {
            let t = lines[i].trim_end().trim_end_matches(['"', '\'', '\u{201d}', '\u{2019}', ')', ']', '\u{bb}']);
            !t.ends_with(['.', '!', '?', '\u{2026}'])
        })
        .collect();
    let at = token_lines(poem, doc);
    let mut out = BTreeMap::new();
    // every (head, dependent) pair in the document
    for (hi, h) in doc.tokens.iter().enumerate() {
        for (di, d) in doc.tokens.iter().enumerate() {
            if h.sentence != d.sentence || d.head != h.id {
                continue;
            }
            let (lo, hi_line) = (at[hi].min(at[di]), at[hi].max(at[di]));
            if breaks.iter().any(|&b| lo <= b && b < hi_line) {
                *out.entry((h.upos.clone(), d.upos.clone(), d.deprel.clone())).or_default() += 1;
            }
        }
    }
    out
}
