use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Run {
        stage: &'static str,
        #[source]
        source: curlcurl_core::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn run(stage: &'static str) -> impl FnOnce(curlcurl_core::Error) -> CliError {
        move |source| CliError::Run { stage, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run { source: curlcurl_core::Error::NotConverged(_), .. } => 2,
            _ => 1,
        }
    }
}
