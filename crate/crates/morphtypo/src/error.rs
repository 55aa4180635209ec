use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] morphtypo_core::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    /// 1 for bad input, 2 for internal or numerical failures.
    pub fn exit_code(&self) -> i32 {
        use morphtypo_core::Error as C;
        match self {
            Error::Core(C::RankDeficient(_) | C::TooFewObservations { .. } | C::NoPredictors) => 2,
            Error::Core(_) => 1,
            Error::Io { .. } | Error::Parse { .. } | Error::Config(_) | Error::Input(_) => 1,
            Error::Json(e) if e.is_io() => 2,
            Error::Json(_) => 1,
            Error::Csv(_) | Error::Numerical(_) => 2,
        }
    }
}
