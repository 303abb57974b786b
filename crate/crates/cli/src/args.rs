use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wisp_core::bench::Policy;
use wisp_core::stats::{Dimension, Mode};

#[derive(Debug, Parser)]
#[command(name = "wisp", version, about = "Whitespace-faithful poem processing")]
pub struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for corpus-parallel stages.
    #[arg(long, short = 'j', global = true)]
    pub jobs: Option<usize>,
    /// Only log errors; warnings and notices are suppressed.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert poem HTML pages to whitespace-faithful plain text.
    Linearize(LinearizeArgs),
    /// Label every whitespace event in a corpus.
    Annotate(AnnotateArgs),
    /// Score linearization methods from auto checks or human verdicts.
    Bench(BenchArgs),
    /// Corpus statistics tables and plot data.
    Stats(StatsArgs),
    /// Run the review service until interrupted.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct LinearizeArgs {
    /// HTML files or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub px_per_space: Option<f64>,
    #[arg(long)]
    pub em_per_space: Option<f64>,
    #[arg(long)]
    pub max_indent_spaces: Option<usize>,
    #[arg(long)]
    pub center_width: Option<usize>,
    #[arg(long)]
    pub tab_width: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnnotationFormat {
    Jsonl,
    Tsv,
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    /// Corpus in JSON Lines.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Directory of `<poem_id>.conllu` files, or a JSON object mapping
    /// poem ids to CoNLL-U paths.
    #[arg(long)]
    pub syntax: Option<PathBuf>,
    /// Output file; stdout if absent or `-`.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: AnnotationFormat,
    /// Also write dependency triples spanning enjambed breaks as TSV.
    #[arg(long)]
    pub triples: Option<PathBuf>,
    #[arg(long)]
    pub line_length_cv_threshold: Option<f64>,
    #[arg(long)]
    pub exclude_centered_prefix: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMode {
    Auto,
    Human,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub mode: BenchMode,
    /// Ground truth: JSON Lines corpus or directory of `<poem_id>.txt`.
    #[arg(long)]
    pub truths: Option<PathBuf>,
    /// `METHOD=PATH`, same formats as --truths. Repeatable.
    #[arg(long = "candidates", value_name = "METHOD=PATH")]
    pub candidates: Vec<String>,
    /// Verdict log in JSON Lines, e.g. the review service export.
    #[arg(long)]
    pub verdicts: Option<PathBuf>,
    #[arg(long)]
    pub policy: Option<Policy>,
    /// Output directory for report files.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Annotation JSON Lines; annotated on the fly without syntax if absent.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// per_line or per_nonstandard_event. No default.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Grouping dimension. Repeatable.
    #[arg(long = "dimension")]
    pub dimensions: Vec<Dimension>,
    /// Label for the `method` dimension.
    #[arg(long)]
    pub method_label: Option<String>,
    #[arg(long)]
    pub tag_min: Option<usize>,
    #[arg(long)]
    pub punct_min_count: Option<usize>,
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Restrict punctuation tables to these forms. Repeatable.
    #[arg(long = "form")]
    pub forms: Vec<String>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub bind: Option<String>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
    #[arg(long)]
    pub lease_secs: Option<u64>,
    #[arg(long)]
    pub policy: Option<Policy>,
}
