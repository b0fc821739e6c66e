//! File-level encrypt, decrypt, inspect and generate operations behind the
//! `selenc` command line.

mod commands;
mod entropy;
mod generator;
mod kdf;
mod report;

pub use commands::{
    cmd_bench, cmd_decrypt, cmd_encrypt, cmd_gen_test, cmd_inspect, DecryptRequest, EncryptRequest,
};
pub use entropy::{estimate_passphrase_bits, StrengthEstimate, STRONG_KEY_BITS};
pub use generator::{gen_test_stream, GeneratorConfig, DEFAULT_PAYLOAD};
pub use kdf::{derive_key, parse_hex_key, passphrase_key, KeySource, DEFAULT_KDF_ITERATIONS};
pub use report::{ReportRow, StreamReport};

use std::path::PathBuf;

use thiserror::Error;

use crate::aes::AesError;
use crate::bitstream::BitstreamError;
use crate::selective::SelectiveError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Bitstream(#[from] BitstreamError),
    #[error(transparent)]
    Selective(#[from] SelectiveError),
    #[error(transparent)]
    Aes(#[from] AesError),
    #[error("bad hex key: {0}")]
    BadHex(String),
    #[error("passphrase is empty")]
    EmptyPassphrase,
    #[error("{0}")]
    InvalidArgument(String),
}

impl PipelineError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }

    /// The selective-layer error, if that is what this is.
    pub fn selective(&self) -> Option<&SelectiveError> {
        match self {
            PipelineError::Selective(e) => Some(e),
            _ => None,
        }
    }
}
