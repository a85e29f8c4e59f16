use std::path::PathBuf;

use effx_core::{DatasetError, DeaError, TobitError};

use crate::covariates::CovariateError;

/// Everything the CLI can fail with. Each variant maps to one exit code and
/// every diagnostic names the module and the error variant.
#[derive(Debug, thiserror::Error)]
pub enum EffxError {
    #[error("usage error {0}")]
    Usage(String),
    #[error("io error IoError: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset error {name}: {0}", name = .0.name())]
    Dataset(#[from] DatasetError),
    #[error("covariates error {name}: {0}", name = .0.name())]
    Covariates(#[from] CovariateError),
    #[error("dea error {name}: {0}", name = .0.name())]
    Dea(#[from] DeaError),
    #[error("tobit error {name}: {0}", name = .0.name())]
    Tobit(#[from] TobitError),
}

impl EffxError {
    pub fn exit_code(&self) -> u8 {
        match self {
            EffxError::Usage(_) => 2,
            EffxError::Io { .. } | EffxError::Dataset(_) | EffxError::Covariates(_) => 3,
            EffxError::Dea(DeaError::InvalidOptions(_)) => 2,
            EffxError::Tobit(TobitError::InvalidSample(_)) => 3,
            EffxError::Dea(_) | EffxError::Tobit(_) => 4,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        EffxError::Usage(msg.into())
    }
}
