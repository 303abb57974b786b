use wisp_core::model::CorpusError;
use wisp_core::syntax::SyntaxError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Syntax { path: String, source: SyntaxError },
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Service(#[from] wisp_service::ServiceError),
    #[error("{failed} of {total} inputs failed")]
    Partial { failed: usize, total: usize },
}

impl CliError {
    /// 0 success, 1 data error, 2 usage error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            _ => 1,
        }
    }
}

pub fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

pub type Result<T> = std::result::Result<T, CliError>;
