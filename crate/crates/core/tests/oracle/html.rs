//! Random poems rendered in the four supported markup conventions.

use rand::Rng;

#[derive(Debug, Clone)]
pub struct Line {
    pub indent: usize,
    pub words: Vec<String>,
    pub gap: usize,
}

fn nbsp(n: usize) -> String {
    "&nbsp;".repeat(n)
}

/// Internal gaps use runs of non-breaking spaces so they survive
/// whitespace collapsing.
pub fn render(lines: &[Line], style: u8) -> String {
    let text = |l: &Line| l.words.join(&nbsp(1 + l.indent % 3).replacen("&nbsp;", " ", 1));
    let mut body = String::new();
    match style {
        0 => {
            for l in lines {
                body += &format!("<div style=\"margin-left: {}px\">{}</div>\n", l.indent * 10, text(l));
                body += &"<div></div>\n".repeat(l.gap);
            }
        }
        1 => {
            body += "<p>";
            for (i, l) in lines.iter().enumerate() {
                if i > 0 {
                    body += if l.gap > 0 { "</p>\n<p>" } else { "<br>\n" };
                }
                body += &format!("{}{}", nbsp(l.indent), text(l));
            }
            body += "</p><p>end.</p>";
        }
        2 => {
            body += "<div class=\"poem\">\n";
            for l in lines {
                body += &format!("{}{}<br>\n", nbsp(l.indent), text(l));
                body += &"<br>\n".repeat(l.gap);
            }
            body += "</div>";
        }
        _ => {
            body += "<div style=\"text-align:center\">";
            for l in lines {
                body += &format!("<div>{}</div>", text(l));
            }
            body += "</div>";
        }
    }
    format!("<html><head><title>t</title></head><body>{body}</body></html>")
}

/// Visible characters the linearizer must reproduce, in order.
pub fn expected_visible(lines: &[Line], style: u8) -> String {
    let mut want: String = lines.iter().flat_map(|l| l.words.iter()).flat_map(|w| w.chars()).collect();
    if style == 1 {
        want += "end.";
    }
    want
}

const LETTERS: &[char] = &['a', 'e', 'k', 'o', 'r', 's', 't', 'w', '\'', 'é', 'ø'];
const PUNCT: &[char] = &[',', '.', ';', ':', '!', '?'];

pub fn random_word(rng: &mut impl Rng) -> String {
    let mut w = String::new();
    w.push(if rng.gen_bool(0.5) { rng.gen_range('A'..='Z') } else { rng.gen_range('a'..='z') });
    for _ in 0..rng.gen_range(0..8) {
        w.push(LETTERS[rng.gen_range(0..LETTERS.len())]);
    }
    if rng.gen_bool(0.3) {
        w.push(PUNCT[rng.gen_range(0..PUNCT.len())]);
    }
    w
}

pub fn random_lines(rng: &mut impl Rng) -> Vec<Line> {
    (0..rng.gen_range(1..12))
        .map(|_| Line {
            indent: rng.gen_range(0..12),
            words: (0..rng.gen_range(1..6)).map(|_| random_word(rng)).collect(),
            gap: rng.gen_range(0usize..4).saturating_sub(2),
        })
        .collect()
}
