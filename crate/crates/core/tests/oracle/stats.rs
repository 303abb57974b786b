//! Recount oracles for corpus statistics, working from poem text alone.

use std::collections::BTreeMap;

use rand::Rng;
use wisp_core::{Poem, Source};

pub const TAGS: [&str; 6] = ["Animals", "Cities", "Grief", "Love", "Nature", "War"];

/// Leading-space widths of the indented lines.
pub fn prefix_lengths(p: &Poem) -> Vec<usize> {
    p.lines()
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.len() - l.trim_start_matches(' ').len())
        .filter(|&n| n > 0)
        .collect()
}

/// Six tags with different indentation habits; each poem carries one to
/// three tags.
pub fn six_tag_corpus(rng: &mut impl Rng, poems: usize) -> Vec<Poem> {
    (0..poems)
        .map(|i| {
            let k = rng.gen_range(1..=3);
            let tags: Vec<usize> = (0..k).map(|_| rng.gen_range(0..TAGS.len())).collect();
            let depth = 1 + 3 * tags.iter().max().unwrap();
            let body: String = (0..rng.gen_range(2..8))
                .map(|_| {
                    let indent = if rng.gen_bool(0.5) { rng.gen_range(0..=depth) } else { 0 };
                    format!("{}word here\n", " ".repeat(indent))
                })
                .collect();
            let mut p = Poem::new(format!("s{i}"), Source::Published, &body);
            p.poet = format!("poet{}", i % 7);
            p.tags = tags.iter().map(|&t| TAGS[t].to_string()).collect();
            p
        })
        .collect()
}

/// Sorted-array percentile at index ceil(0.75 n) - 1.
pub fn p75(mut xs: Vec<usize>) -> Option<usize> {
    xs.sort();
    if xs.is_empty() {
        return None;
    }
    let idx = (3 * xs.len()).div_ceil(4) - 1;
    Some(xs[idx])
}

/// tag -> (poems above the percentile, poems)
pub fn tag_shares(poems: &[Poem], tag_min: usize) -> (Option<usize>, BTreeMap<String, (usize, usize)>) {
    let pct = p75(poems.iter().flat_map(prefix_lengths).collect());
    let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for p in poems {
        let high = pct.is_some_and(|t| prefix_lengths(p).iter().any(|&n| n > t));
        for tag in &p.tags {
            let e = out.entry(tag.clone()).or_default();
            e.0 += usize::from(high);
            e.1 += 1;
        }
    }
    out.retain(|_, v| v.1 >= tag_min);
    (pct, out)
}
