use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{criterion}: {source}")]
    Numerics {
        criterion: &'static str,
        #[source]
        source: fracfield_core::Error,
    },

    #[error("{0}")]
    Core(#[from] fracfield_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Tags a numerical error with the criterion it was computing.
pub(crate) trait Annotate<T> {
    fn during(self, criterion: &'static str) -> Result<T>;
}

impl<T> Annotate<T> for fracfield_core::Result<T> {
    fn during(self, criterion: &'static str) -> Result<T> {
        self.map_err(|source| CliError::Numerics { criterion, source })
    }
}
