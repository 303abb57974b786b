//! Whitespace-faithful poem processing: HTML linearization, whitespace
//! typology annotation, bench scoring and corpus statistics.

pub mod annotate;
pub mod bench;
pub mod config;
pub mod dom;
pub mod linearize;
pub mod model;
pub mod stats;
pub mod syntax;
pub mod text;
pub mod typography;

pub use annotate::{annotate, annotate_with_layout};
pub use config::{AnnotatorConfig, IndentRule, LengthUnit, LinearizerConfig};
pub use linearize::{detect_layout_style, linearize, margin_to_indent, LayoutStyle, Linearized};
pub use model::{
    load_corpus, validate_annotation, Category, CorpusFormat, Poem, Source, Subcategory,
    WhitespaceEvent, WispAnnotation, WispCategory,
};
pub use typography::{normalize_typography, WidthTable};
