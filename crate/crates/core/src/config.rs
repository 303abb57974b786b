//! Declarative configuration shared by the linearizer and the annotator.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::typography::WidthTable;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{field} must be positive, got {value}")]
    NotPositive { field: &'static str, value: f64 },
    #[error("{field} must not be negative, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("{0} must not be empty")]
    Empty(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndentRule {
    pub px_per_space: f64,
    pub em_per_space: f64,
    pub max_indent_spaces: usize,
}

impl Default for IndentRule {
    fn default() -> Self {
        IndentRule { px_per_space: 10.0, em_per_space: 0.5, max_indent_spaces: 64 }
    }
}

impl IndentRule {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("px_per_space", self.px_per_space)?;
        positive("em_per_space", self.em_per_space)?;
        positive("max_indent_spaces", self.max_indent_spaces as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearizerConfig {
    pub indent: IndentRule,
    pub center_width: usize,
    pub tab_width: usize,
    pub width_table: WidthTable,
}

impl Default for LinearizerConfig {
    fn default() -> Self {
        LinearizerConfig {
            indent: IndentRule::default(),
            center_width: 64,
            tab_width: 4,
            width_table: WidthTable::default(),
        }
    }
}

impl LinearizerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.indent.validate()?;
        positive("center_width", self.center_width as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    #[default]
    Characters,
    Words,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnotatorConfig {
    pub sentence_end_punct: BTreeSet<char>,
    /// Closers accepted after a sentence-final mark, as in `night."`.
    pub closing_punct: BTreeSet<char>,
    pub stanza_gap_lines: usize,
    pub indent_period_max: usize,
    pub indent_coverage: f64,
    pub line_length_cv_threshold: f64,
    pub length_unit: LengthUnit,
    pub clausal_relations: BTreeSet<String>,
    pub exclude_centered_prefix: bool,
}

impl Default for AnnotatorConfig {
    fn default() -> Self {
        AnnotatorConfig {
            sentence_end_punct: ['.', '!', '?', '…'].into_iter().collect(),
            closing_punct: ['"', '\'', '”', '’', ')', ']', '»'].into_iter().collect(),
            stanza_gap_lines: 1,
            indent_period_max: 8,
            indent_coverage: 0.8,
            line_length_cv_threshold: 0.25,
            length_unit: LengthUnit::Characters,
            clausal_relations: ["nsubj", "obj", "iobj", "csubj", "ccomp", "xcomp", "advcl", "acl"]
                .into_iter()
                .map(String::from)
                .collect(),
            exclude_centered_prefix: false,
        }
    }
}

impl AnnotatorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.sentence_end_punct.is_empty() {
            return Err(ConfigError::Empty("sentence_end_punct"));
        }
        positive("stanza_gap_lines", self.stanza_gap_lines as f64)?;
        positive("indent_period_max", self.indent_period_max as f64)?;
        positive("indent_coverage", self.indent_coverage)?;
        if self.line_length_cv_threshold < 0.0 || self.line_length_cv_threshold.is_nan() {
            return Err(ConfigError::Negative {
                field: "line_length_cv_threshold",
                value: self.line_length_cv_threshold,
            });
        }
        Ok(())
    }

    /// True if `line` ends a sentence: its last visible char is terminal
    /// punctuation, possibly followed by closing quotes or brackets.
    pub fn ends_sentence(&self, line: &str) -> bool {
        let mut chars = line.trim_end().chars().rev().peekable();
        while chars.peek().is_some_and(|c| self.closing_punct.contains(c)) {
            chars.next();
        }
        chars.next().is_some_and(|c| self.sentence_end_punct.contains(&c))
    }
}

fn positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::NotPositive { field, value })
    }
}
