use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad or missing input data: corpus paths, malformed corpus files.
    #[error("{module}: input error: {message}")]
    Input {
        module: &'static str,
        message: String,
    },

    /// A configuration value violates its invariant.
    #[error("{module}: configuration error: {message}")]
    Config {
        module: &'static str,
        message: String,
    },

    /// A curve metric whose definition collapses on the given input.
    #[error("evaluation: {metric} is undefined: {reason}")]
    UndefinedMetric {
        metric: &'static str,
        reason: &'static str,
    },

    #[error("{module}: internal error: {message}")]
    Internal {
        module: &'static str,
        message: String,
    },

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn input(module: &'static str, message: impl Into<String>) -> Self {
        Error::Input {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn config(module: &'static str, message: impl Into<String>) -> Self {
        Error::Config {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn internal(module: &'static str, message: impl Into<String>) -> Self {
        Error::Internal {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error class: 2 for input errors, 3 for
    /// configuration errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input { .. } => 2,
            Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => 2,
            Error::Config { .. } => 3,
            _ => 1,
        }
    }
}
