use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A tunable parameter outside its permissible range.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{field} = {value} is out of range: permissible {permissible}")]
pub struct ParamError {
    pub field: &'static str,
    pub value: i64,
    pub permissible: &'static str,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("{stage}: dimension mismatch, expected {expected:?} but got {actual:?}")]
    DimensionMismatch {
        stage: &'static str,
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("{stage}: {source}")]
    Param {
        stage: &'static str,
        #[source]
        source: ParamError,
    },

    #[error("stroke point ({x}, {y}) lies outside the {width}x{height} image")]
    StrokeOutOfBounds {
        x: i64,
        y: i64,
        width: usize,
        height: usize,
    },

    #[error("stroke width must be at least 1")]
    StrokeWidth,

    #[error("seed set is not contained in the mask")]
    SeedOutsideMask,

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to decode image: {0}")]
    Decode(#[from] image::ImageError),

    #[error("malformed {what}: {source}")]
    Json {
        what: &'static str,
        #[source]
        source: serde_json::Error,
    },

    #[error("malformed label sidecar: {0}")]
    Sidecar(String),
}

impl Error {
    pub(crate) fn param(stage: &'static str, source: ParamError) -> Self {
        Error::Param { stage, source }
    }
}
