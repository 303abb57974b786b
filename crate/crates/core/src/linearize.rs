//! HTML poem to whitespace-faithful plain text.
//!
//! Only inline `style` attributes and a few element conventions are read;
//! stylesheets and scripts are ignored.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{IndentRule, LinearizerConfig};
use crate::dom::{is_skipped, Document, NodeData, NodeId, ROOT};
use crate::text;
use crate::typography::push_normalized;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LayoutStyle {
    LineDivs,
    BrParagraph,
    PStanzas,
    Centered,
}

impl fmt::Display for LayoutStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayoutStyle::LineDivs => "LINE_DIVS",
            LayoutStyle::BrParagraph => "BR_PARAGRAPH",
            LayoutStyle::PStanzas => "P_STANZAS",
            LayoutStyle::Centered => "CENTERED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinearizeError {
    #[error("unsupported layout: no poem structure recognized at <{element}>")]
    UnsupportedLayout { element: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MarginParseError {
    #[error("cannot parse CSS length {0:?}")]
    Unparseable(String),
    #[error("unsupported CSS unit in {0:?} (px and em only)")]
    UnsupportedUnit(String),
    #[error("negative CSS length {0:?}")]
    Negative(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linearized {
    pub text: String,
    pub style: LayoutStyle,
    /// Output line indices whose prefix came from centering.
    pub centered_lines: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Converts one CSS length to a space count under `rule`.
pub fn margin_to_indent(margin: &str, rule: &IndentRule) -> Result<usize, MarginParseError> {
    let spaces = css_length_in_spaces(margin, rule)?;
    if spaces < 0.0 {
        return Err(MarginParseError::Negative(margin.trim().to_string()));
    }
    Ok(clamp_indent(spaces, rule))
}

fn clamp_indent(spaces: f64, rule: &IndentRule) -> usize {
    let r = spaces.round();
    if r <= 0.0 {
        0
    } else {
        (r as usize).min(rule.max_indent_spaces)
    }
}

/// Signed length in spaces. `auto` and the CSS-wide keywords read as zero.
fn css_length_in_spaces(value: &str, rule: &IndentRule) -> Result<f64, MarginParseError> {
    let v = value.trim().trim_end_matches("!important").trim().to_ascii_lowercase();
    if v.is_empty() {
        return Err(MarginParseError::Unparseable(value.to_string()));
    }
    if matches!(v.as_str(), "auto" | "inherit" | "initial" | "unset" | "revert") {
        return Ok(0.0);
    }
    let split = v
        .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+'))
        .unwrap_or(v.len());
    let (num, unit) = v.split_at(split);
    let n: f64 = num.parse().map_err(|_| MarginParseError::Unparseable(value.trim().to_string()))?;
    if !n.is_finite() {
        return Err(MarginParseError::Unparseable(value.trim().to_string()));
    }
    match unit {
        "px" => Ok(n / rule.px_per_space),
        "em" => Ok(n / rule.em_per_space),
        "" if n == 0.0 => Ok(0.0),
        "" => Err(MarginParseError::Unparseable(value.trim().to_string())),
        _ => Err(MarginParseError::UnsupportedUnit(value.trim().to_string())),
    }
}

fn style_decls(doc: &Document, id: NodeId) -> Vec<(String, String)> {
    let Some(style) = doc.attr(id, "style") else { return Vec::new() };
    style
        .split(';')
        .filter_map(|decl| {
            let (k, v) = decl.split_once(':')?;
            Some((k.trim().to_ascii_lowercase(), v.trim().to_string()))
        })
        .collect()
}

const BLOCKS: &[&str] = &[
    "address", "article", "aside", "blockquote", "center", "dd", "div", "dl", "dt", "fieldset",
    "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr",
    "li", "main", "nav", "ol", "p", "pre", "section", "table", "tbody", "td", "tfoot", "th",
    "thead", "tr", "ul", "body", "html",
];

fn is_block_tag(tag: &str) -> bool {
    BLOCKS.contains(&tag)
}

struct Layout<'a> {
    doc: &'a Document,
    container: NodeId,
}

impl<'a> Layout<'a> {
    fn new(doc: &'a Document) -> Self {
        let container = ["poem-body", "o-poem", "poem"]
            .iter()
            .find_map(|class| doc.find_first(ROOT, |n| doc.has_class(n, class)))
            .or_else(|| doc.find_first(ROOT, |n| doc.tag(n) == Some("body")))
            .unwrap_or(ROOT);
        Layout { doc, container }
    }

    fn is_block(&self, id: NodeId) -> bool {
        self.doc.tag(id).is_some_and(is_block_tag)
    }

    /// Elements of the container, skipping script-like subtrees.
    fn elements(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![self.container];
        while let Some(n) = stack.pop() {
            match self.doc.tag(n) {
                Some(t) if is_skipped(t) => continue,
                Some(_) => out.push(n),
                None => {}
            }
            stack.extend(self.doc.children(n).iter().rev());
        }
        out
    }

    fn has_block_descendant(&self, id: NodeId) -> bool {
        self.doc.descendants(id).into_iter().skip(1).any(|n| self.is_block(n))
    }

    fn has_block_child(&self, id: NodeId) -> bool {
        self.doc.children(id).iter().any(|&n| self.is_block(n))
    }

    fn has_text(&self, id: NodeId) -> bool {
        self.doc.text_content(id).chars().any(text::is_visible)
    }

    /// Nearest explicit alignment wins, searching up to the container.
    fn is_centered(&self, id: NodeId) -> bool {
        let chain = std::iter::once(id).chain(self.doc.ancestors(id));
        for n in chain {
            if let Some(c) = self.explicit_center(n) {
                return c;
            }
            if n == self.container {
                break;
            }
        }
        false
    }

    fn explicit_center(&self, id: NodeId) -> Option<bool> {
        if let Some(v) = style_decls(self.doc, id)
            .iter()
            .rev()
            .find(|(k, _)| k == "text-align")
            .map(|(_, v)| v.to_ascii_lowercase())
        {
            return Some(v.starts_with("center"));
        }
        if let Some(a) = self.doc.attr(id, "align") {
            return Some(a.eq_ignore_ascii_case("center"));
        }
        if self.doc.tag(id) == Some("center") {
            return Some(true);
        }
        None
    }

    fn nearest_block(&self, id: NodeId) -> NodeId {
        self.doc
            .ancestors(id)
            .find(|&a| a == self.container || self.is_block(a))
            .unwrap_or(self.container)
    }

    fn detect(&self) -> Result<LayoutStyle, LinearizeError> {
        let (mut line_divs, mut paras, mut br_blocks, mut centered) = (0, 0, 0, 0);
        for n in self.elements() {
            let tag = self.doc.tag(n).unwrap_or_default();
            if tag == "br" {
                let block = self.nearest_block(n);
                if !self.is_centered(block) && self.has_text(block) {
                    br_blocks += 1;
                } else if self.is_centered(block) && self.has_text(block) {
                    centered += 1;
                }
                continue;
            }
            if !(self.is_block(n) || n == self.container) || !self.has_text(n) {
                continue;
            }
            let leaf = !self.has_block_descendant(n);
            if self.is_centered(n) {
                if leaf {
                    centered += 1;
                }
            } else if tag == "p" {
                paras += 1;
            } else if tag == "div" && leaf {
                line_divs += 1;
            }
        }
        if line_divs >= 2 {
            Ok(LayoutStyle::LineDivs)
        } else if paras >= 2 {
            Ok(LayoutStyle::PStanzas)
        } else if br_blocks >= 1 || paras == 1 {
            Ok(LayoutStyle::BrParagraph)
        } else if centered >= 1 {
            Ok(LayoutStyle::Centered)
        } else if line_divs == 1 {
            Ok(LayoutStyle::LineDivs)
        } else {
            Err(LinearizeError::UnsupportedLayout { element: self.unrecognized_element() })
        }
    }

    fn unrecognized_element(&self) -> String {
        self.doc
            .children(self.container)
            .iter()
            .filter_map(|&c| self.doc.tag(c))
            .find(|t| !is_skipped(t))
            .or_else(|| self.doc.tag(self.container))
            .unwrap_or("body")
            .to_string()
    }
}

pub fn detect_layout_style(html: &str) -> Result<LayoutStyle, LinearizeError> {
    let doc = Document::parse(html);
    Layout::new(&doc).detect()
}

pub fn linearize(html: &str, cfg: &LinearizerConfig) -> Result<Linearized, LinearizeError> {
    let doc = Document::parse(html);
    let layout = Layout::new(&doc);
    let style = layout.detect()?;
    let mut w = Walker {
        layout: &layout,
        cfg,
        out: Vec::new(),
        cur: String::new(),
        cur_indent: 0.0,
        cur_centered: false,
        cur_open: false,
        pending_gap: false,
        in_pre: 0,
        stack: Vec::new(),
        warnings: Vec::new(),
    };
    w.block(layout.container);
    let Walker { out, warnings, .. } = w;
    let (text, centered_lines) = render(out, style, cfg);
    Ok(Linearized { text, style, centered_lines, warnings })
}

#[derive(Debug)]
enum Line {
    Text { text: String, indent: f64, centered: bool },
    Blank,
}

#[derive(Debug, Clone, Copy)]
struct BlockCtx {
    base: f64,
    first: f64,
    lines_started: usize,
    centered: bool,
}

struct Walker<'a> {
    layout: &'a Layout<'a>,
    cfg: &'a LinearizerConfig,
    out: Vec<Line>,
    cur: String,
    cur_indent: f64,
    cur_centered: bool,
    cur_open: bool,
    pending_gap: bool,
    in_pre: usize,
    stack: Vec<BlockCtx>,
    warnings: Vec<String>,
}

impl Walker<'_> {
    fn doc(&self) -> &Document {
        self.layout.doc
    }

    fn node(&mut self, id: NodeId) {
        match &self.doc().node(id).data {
            NodeData::Text(t) => {
                let t = t.clone();
                self.text(&t);
            }
            NodeData::Element { .. } => {
                let tag = self.doc().tag(id).unwrap_or_default().to_string();
                if is_skipped(&tag) {
                    return;
                }
                if tag == "br" {
                    self.open_line();
                    self.end_line();
                } else if is_block_tag(&tag) {
                    self.block(id);
                } else {
                    self.children(id);
                }
            }
            _ => {}
        }
    }

    fn children(&mut self, id: NodeId) {
        let kids = self.doc().children(id).to_vec();
        for c in kids {
            self.node(c);
        }
    }

    fn is_stanza(&self, id: NodeId) -> bool {
        self.doc().tag(id) == Some("p") || self.layout.has_block_child(id)
    }

    fn block(&mut self, id: NodeId) {
        self.flush();
        let is_container = id == self.layout.container;
        let stanza = !is_container && self.is_stanza(id);
        if stanza {
            self.pending_gap = true;
        }
        let parent = self.stack.last().copied();
        let (margin, text_indent) = if is_container { (0.0, 0.0) } else { self.indents(id) };
        let base = parent.map_or(0.0, |p| p.base) + margin;
        self.stack.push(BlockCtx {
            base,
            first: base + text_indent,
            lines_started: 0,
            centered: self.layout.is_centered(id),
        });
        let pre = self.doc().tag(id) == Some("pre");
        if pre {
            self.in_pre += 1;
        }
        self.children(id);
        if pre {
            self.in_pre -= 1;
        }
        self.flush();
        let ctx = self.stack.pop().expect("block stack");
        if ctx.lines_started == 0 && !is_container && !self.layout.has_block_descendant(id) {
            self.emit(Line::Blank);
        }
        if stanza {
            self.pending_gap = true;
        }
    }

    /// (left margin + padding, text-indent) in spaces, unrounded.
    fn indents(&mut self, id: NodeId) -> (f64, f64) {
        let rule = &self.cfg.indent;
        let (mut margin, mut padding, mut indent) = (0.0, 0.0, 0.0);
        for (prop, value) in style_decls(self.doc(), id) {
            let slot = match prop.as_str() {
                "margin-left" | "margin-inline-start" => &mut margin,
                "padding-left" | "padding-inline-start" => &mut padding,
                "text-indent" => &mut indent,
                "margin" | "padding" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    let left = match parts.len() {
                        1 => parts[0],
                        2 | 3 => parts[1],
                        4 => parts[3],
                        _ => continue,
                    };
                    let slot = if prop == "margin" { &mut margin } else { &mut padding };
                    match css_length_in_spaces(left, rule) {
                        Ok(v) => *slot = v,
                        Err(e) => {
                            *slot = 0.0;
                            let msg = format!("{prop}: {e}; using 0");
                            log::warn!("{msg}");
                            self.warnings.push(msg);
                        }
                    }
                    continue;
                }
                _ => continue,
            };
            match css_length_in_spaces(&value, rule) {
                Ok(v) => *slot = v,
                Err(e) => {
                    *slot = 0.0;
                    let msg = format!("{prop}: {e}; using 0");
                    log::warn!("{msg}");
                    self.warnings.push(msg);
                }
            }
        }
        (margin + padding, indent)
    }

    fn open_line(&mut self) {
        if self.cur_open {
            return;
        }
        let ctx = self.stack.last_mut().expect("inside a block");
        self.cur_indent = if ctx.lines_started == 0 { ctx.first } else { ctx.base };
        self.cur_centered = ctx.centered;
        ctx.lines_started += 1;
        self.cur_open = true;
    }

    /// Closes the current line; an empty one becomes a blank line.
    fn end_line(&mut self) {
        let text = std::mem::take(&mut self.cur);
        self.cur_open = false;
        if text.trim_matches(' ').is_empty() {
            self.emit(Line::Blank);
        } else {
            self.emit(Line::Text { text, indent: self.cur_indent, centered: self.cur_centered });
        }
    }

    fn flush(&mut self) {
        if self.cur_open {
            self.end_line();
        }
    }

    fn emit(&mut self, line: Line) {
        if self.pending_gap && matches!(self.out.last(), Some(Line::Text { .. })) {
            self.out.push(Line::Blank);
        }
        self.pending_gap = false;
        self.out.push(line);
    }

    fn push_char(&mut self, c: char) {
        self.open_line();
        push_normalized(c, &self.cfg.width_table, &mut self.cur);
    }

    fn text(&mut self, t: &str) {
        let tab = self.cfg.tab_width;
        if self.in_pre > 0 {
            for c in t.chars() {
                match c {
                    '\n' => {
                        self.open_line();
                        self.end_line();
                    }
                    '\r' => {}
                    '\t' => {
                        self.open_line();
                        self.cur.extend(std::iter::repeat_n(' ', tab));
                    }
                    c => self.push_char(c),
                }
            }
            return;
        }
        let chars: Vec<char> = t.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if !is_raw_space(chars[i]) {
                self.push_char(chars[i]);
                i += 1;
                continue;
            }
            let start = i;
            while i < chars.len() && is_raw_space(chars[i]) {
                i += 1;
            }
            // leading source whitespace is markup formatting, not indentation
            if !self.cur_open {
                continue;
            }
            let run = &chars[start..i];
            if run.iter().any(|&c| c == '\n' || c == '\r' || c == '\x0c') {
                self.cur.push(' ');
            } else {
                for &c in run {
                    match c {
                        '\t' => self.cur.extend(std::iter::repeat_n(' ', tab)),
                        _ => self.cur.push(' '),
                    }
                }
            }
        }
    }
}

fn is_raw_space(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r' | '\x0c')
}

fn render(lines: Vec<Line>, style: LayoutStyle, cfg: &LinearizerConfig) -> (String, Vec<usize>) {
    let first = lines.iter().position(|l| matches!(l, Line::Text { .. }));
    let last = lines.iter().rposition(|l| matches!(l, Line::Text { .. }));
    let (Some(first), Some(last)) = (first, last) else {
        return ("\n".to_string(), Vec::new());
    };
    let mut out = String::new();
    let mut centered_lines = Vec::new();
    for (i, line) in lines[first..=last].iter().enumerate() {
        match line {
            Line::Blank => {}
            Line::Text { text, indent, centered } => {
                if style == LayoutStyle::Centered && *centered {
                    let t = text.trim_matches(' ');
                    let pad = cfg.center_width.saturating_sub(text::display_width(t)) / 2;
                    out.extend(std::iter::repeat_n(' ', pad));
                    out.push_str(t);
                    centered_lines.push(i);
                } else {
                    let pad = clamp_indent(*indent, &cfg.indent);
                    out.extend(std::iter::repeat_n(' ', pad));
                    out.push_str(text.trim_end_matches(' '));
                }
            }
        }
        out.push('\n');
    }
    (out, centered_lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(html: &str) -> Linearized {
        linearize(html, &LinearizerConfig::default()).unwrap()
    }

    #[test]
    fn margin_conversion() {
        let rule = IndentRule::default();
        assert_eq!(margin_to_indent("0px", &rule), Ok(0));
        assert_eq!(margin_to_indent("0", &rule), Ok(0));
        assert_eq!(margin_to_indent("80px", &rule), Ok(8));
        assert_eq!(margin_to_indent("2em", &rule), Ok(4));
        assert_eq!(margin_to_indent("15px", &rule), Ok(2));
        assert_eq!(margin_to_indent("10000px", &rule), Ok(64));
        assert!(matches!(margin_to_indent("-5px", &rule), Err(MarginParseError::Negative(_))));
        assert!(matches!(margin_to_indent("3cm", &rule), Err(MarginParseError::UnsupportedUnit(_))));
        assert!(matches!(margin_to_indent("wide", &rule), Err(MarginParseError::Unparseable(_))));
        assert!(matches!(margin_to_indent("12", &rule), Err(MarginParseError::Unparseable(_))));
    }

    #[test]
    fn detects_styles() {
        assert_eq!(detect_layout_style("<div>a</div><div>b</div>"), Ok(LayoutStyle::LineDivs));
        assert_eq!(detect_layout_style("<p>a<br>b</p>"), Ok(LayoutStyle::BrParagraph));
        assert_eq!(detect_layout_style("<p>a</p><p>b</p>"), Ok(LayoutStyle::PStanzas));
        assert_eq!(
            detect_layout_style("<center>a</center><center>b</center>"),
            Ok(LayoutStyle::Centered)
        );
        assert_eq!(
            detect_layout_style(""),
            Err(LinearizeError::UnsupportedLayout { element: "body".into() })
        );
        assert_eq!(
            detect_layout_style("<table><tr><td>a</td></tr></table>"),
            Err(LinearizeError::UnsupportedLayout { element: "table".into() })
        );
    }

    #[test]
    fn precedence_prefers_line_divs() {
        let html = "<p><div>a</div><div>b</div></p><p>c</p><p>d<br>e</p>";
        assert_eq!(detect_layout_style(html), Ok(LayoutStyle::LineDivs));
    }

    #[test]
    fn two_stanzas_of_line_divs() {
        let html = "<div class='poem'><div><div>a</div><div>b</div></div><div><div>c</div><div>d</div></div></div>";
        assert_eq!(lin(html).text, "a\nb\n\nc\nd\n");
    }

    #[test]
    fn margin_becomes_prefix() {
        let html = "<div>a</div><div style='margin-left: 80px'>b</div>";
        assert_eq!(lin(html).text, "a\n        b\n");
    }

    #[test]
    fn hanging_indent_applies_to_first_line_only() {
        let html = "<p style='padding-left:2em;text-indent:-2em'>a<br>b</p><p>c</p>";
        assert_eq!(lin(html).text, "a\n    b\n\nc\n");
    }

    #[test]
    fn br_runs_make_blank_lines() {
        let html = "<p>a<br>b<br><br>c<br>\n</p>";
        let out = lin(html);
        assert_eq!(out.style, LayoutStyle::BrParagraph);
        assert_eq!(out.text, "a\nb\n\nc\n");
    }

    #[test]
    fn source_newlines_collapse_but_nbsp_and_runs_survive() {
        let html = "<p>\n   &nbsp;&nbsp;the   sea\n   rolls<br>\n   on</p>";
        assert_eq!(lin(html).text, "  the   sea rolls\non\n");
    }

    #[test]
    fn centered_lines_pad_to_width() {
        let cfg = LinearizerConfig { center_width: 10, ..Default::default() };
        let out = linearize("<center>ab</center><center>abcd</center>", &cfg).unwrap();
        assert_eq!(out.text, "    ab\n   abcd\n");
        assert_eq!(out.centered_lines, vec![0, 1]);
    }

    #[test]
    fn bad_margin_warns_and_uses_zero() {
        let out = lin("<div style='margin-left:3cm'>a</div><div>b</div>");
        assert_eq!(out.text, "a\nb\n");
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn ligatures_and_em_spaces_in_html() {
        let out = lin("<p>\u{FB01}ne\u{2003}day</p>");
        assert_eq!(out.text, "fine  day\n");
    }

    #[test]
    fn script_and_style_are_ignored() {
        let out = lin("<div>a<script>x()</script></div><style>p{}</style><div>b</div>");
        assert_eq!(out.text, "a\nb\n");
    }

    #[test]
    fn container_is_preferred_over_page_chrome() {
        let html = "<nav><div>Home</div><div>About</div></nav><div class='poem'><p>x<br>y</p></div>";
        assert_eq!(lin(html).text, "x\ny\n");
    }
}
