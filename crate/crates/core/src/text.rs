//! Line and space-run primitives over normalized poem text.
//!
//! Offsets are in chars. Only ASCII spaces count as whitespace material here;
//! bodies are canonicalized before they reach these helpers.

/// Splits on `\n`. A trailing newline does not produce an extra empty line.
pub fn lines(text: &str) -> Vec<&str> {
    if text.is_empty() {
        return Vec::new();
    }
    let trimmed = text.strip_suffix('\n').unwrap_or(text);
    trimmed.split('\n').collect()
}

/// Zero-width format characters and combining marks, which occupy no column.
pub fn is_zero_width(c: char) -> bool {
    matches!(c,
        '\u{200B}'..='\u{200F}'
        | '\u{2060}'..='\u{2064}'
        | '\u{FEFF}'
        | '\u{00AD}'
        | '\u{0300}'..='\u{036F}'
        | '\u{0483}'..='\u{0489}'
        | '\u{0591}'..='\u{05BD}'
        | '\u{1AB0}'..='\u{1AFF}'
        | '\u{1DC0}'..='\u{1DFF}'
        | '\u{20D0}'..='\u{20FF}'
        | '\u{FE00}'..='\u{FE0F}'
        | '\u{FE20}'..='\u{FE2F}')
}

pub fn is_visible(c: char) -> bool {
    !c.is_whitespace() && !c.is_control() && !is_zero_width(c)
}

pub fn visible_len(line: &str) -> usize {
    line.chars().filter(|&c| is_visible(c)).count()
}

/// Columns the line occupies: every non zero-width char is one column.
pub fn display_width(line: &str) -> usize {
    line.chars().filter(|&c| !is_zero_width(c) && !c.is_control()).count()
}

pub fn is_blank(line: &str) -> bool {
    visible_len(line) == 0
}

pub fn leading_spaces(line: &str) -> usize {
    line.chars().take_while(|&c| c == ' ').count()
}

pub fn visible_chars(text: &str) -> impl Iterator<Item = char> + '_ {
    text.chars().filter(|&c| is_visible(c))
}

pub fn words(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

/// Half-open char range of a run of spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceRun {
    pub start: usize,
    pub end: usize,
}

impl SpaceRun {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Runs of at least `min` spaces with a non-space char on both sides.
pub fn internal_runs(line: &str, min: usize) -> Vec<SpaceRun> {
    let chars: Vec<char> = line.chars().collect();
    let mut runs = Vec::new();
    let mut i = 0;
    let mut seen_content = false;
    while i < chars.len() {
        if chars[i] == ' ' {
            let start = i;
            while i < chars.len() && chars[i] == ' ' {
                i += 1;
            }
            if seen_content && i < chars.len() && i - start >= min {
                runs.push(SpaceRun { start, end: i });
            }
        } else {
            seen_content = true;
            i += 1;
        }
    }
    runs
}

/// Maximal runs of blank lines: `(first_index, len)`. Leading and trailing
/// runs are included; callers decide whether they count.
pub fn blank_runs(lines: &[&str]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        if is_blank(lines[i]) {
            let start = i;
            while i < lines.len() && is_blank(lines[i]) {
                i += 1;
            }
            runs.push((start, i - start));
        } else {
            i += 1;
        }
    }
    runs
}

/// Blank runs with a nonblank line on both sides.
pub fn interior_blank_runs(lines: &[&str]) -> Vec<(usize, usize)> {
    blank_runs(lines)
        .into_iter()
        .filter(|&(start, len)| start > 0 && start + len < lines.len())
        .collect()
}
