mod oracle;

use std::path::{Path, PathBuf};

use proptest::prelude::*;
use wisp_core::text::visible_chars;
use wisp_core::{detect_layout_style, linearize, LayoutStyle, LinearizerConfig};

use oracle::html::{expected_visible, render, Line};

fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/html")
}

#[test]
fn golden_files_are_byte_exact() {
    let cfg = LinearizerConfig::default();
    let mut seen = std::collections::BTreeMap::new();
    for entry in std::fs::read_dir(dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "html") {
            continue;
        }
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let html = std::fs::read_to_string(&path).unwrap();
        let want = std::fs::read_to_string(path.with_extension("txt")).unwrap();
        let got = linearize(&html, &cfg).unwrap();
        assert_eq!(got.text, want, "{stem}");
        let style = stem.rsplit_once('_').unwrap().0.to_uppercase();
        assert_eq!(got.style.to_string(), style, "{stem}");
        *seen.entry(got.style).or_insert(0) += 1;
    }
    for s in [LayoutStyle::LineDivs, LayoutStyle::PStanzas, LayoutStyle::BrParagraph, LayoutStyle::Centered] {
        assert_eq!(seen.get(&s), Some(&3), "{s}");
    }
}

#[test]
fn line_divs_pass_presence_checks_against_hand_truth() {
    use wisp_core::bench::{auto_check, Answer, UnitTestId};
    for n in 1..=3 {
        let html = std::fs::read_to_string(dir().join(format!("line_divs_{n}.html"))).unwrap();
        let truth = std::fs::read_to_string(dir().join(format!("truth/line_divs_{n}.txt"))).unwrap();
        let out = linearize(&html, &LinearizerConfig::default()).unwrap();
        for t in [UnitTestId::LbPresence, UnitTestId::PrefixPresence, UnitTestId::VerticalPresence] {
            assert_ne!(auto_check(t, &truth, &out.text), Answer::Fail, "line_divs_{n} {t}");
        }
    }
}

fn word() -> impl Strategy<Value = String> {
    "[A-Za-z][a-z'éø]{0,7}[,.;:!?]?"
}

fn line() -> impl Strategy<Value = Line> {
    (0usize..12, prop::collection::vec(word(), 1..6), 0usize..4)
        .prop_map(|(indent, words, gap)| Line { indent, words, gap: gap.saturating_sub(2) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn visible_characters_survive(lines in prop::collection::vec(line(), 1..12), style in 0u8..4) {
        let html = render(&lines, style);
        let out = linearize(&html, &LinearizerConfig::default()).unwrap();
        prop_assert_eq!(visible_chars(&out.text).collect::<String>(), expected_visible(&lines, style));
        prop_assert_eq!(detect_layout_style(&html).unwrap(), out.style);
    }

    #[test]
    fn typography_normalization_is_idempotent(s in "[ a-zA-Z\u{2000}-\u{200b}\u{3000}\u{fb00}-\u{fb06}\u{1d00}-\u{1d22}\t\n]{0,40}") {
        let table = wisp_core::WidthTable::default();
        let once = wisp_core::normalize_typography(&s, &table);
        prop_assert_eq!(wisp_core::normalize_typography(&once, &table), once);
    }

    #[test]
    fn deterministic(lines in prop::collection::vec(line(), 1..8), style in 0u8..4) {
        let html = render(&lines, style);
        let cfg = LinearizerConfig::default();
        prop_assert_eq!(linearize(&html, &cfg).unwrap(), linearize(&html, &cfg).unwrap());
    }
}
