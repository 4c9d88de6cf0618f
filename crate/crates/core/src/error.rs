use std::path::PathBuf;

use thiserror::Error;

use crate::curve::CurveId;
use crate::keys::ProtocolId;
use crate::protocols::TagVariant;

#[derive(Debug, Error)]
pub enum Error {
    #[error("protocol mismatch: expected {expected}, found {found}")]
    ProtocolMismatch {
        expected: ProtocolId,
        found: ProtocolId,
    },

    #[error("curve mismatch: expected {expected}, found {found}")]
    CurveMismatch { expected: CurveId, found: CurveId },

    #[error("curve {0} is not compiled into this build")]
    UnsupportedCurve(CurveId),

    #[error("view tag variant {variant} is not available for protocol {protocol}")]
    UnsupportedVariant {
        protocol: ProtocolId,
        variant: TagVariant,
    },

    #[error("invalid view tag width {0}: must be a multiple of 4 in 0..=64")]
    InvalidTagWidth(u32),

    #[error("decode error: {0}")]
    Decode(String),

    /// The ephemeral scalar mapped to a zero stealth scalar; draw a new one.
    #[error("degenerate ephemeral key, resample")]
    DegenerateEphemeral,

    #[error("no meta-address registered under {0:?}")]
    NotFound(String),

    #[error("{}:{line}: {message}", path.display())]
    CorruptRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn decode(msg: impl Into<String>) -> Self {
        Error::Decode(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
