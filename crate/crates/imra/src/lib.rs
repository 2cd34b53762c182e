//! Grid and pyramid files, the `imra` command line, and the `verify`
//! suite, on top of [`imra_core`].

pub mod cli;
pub mod io;
pub mod pyramid;
pub mod suite;

pub use imra_core as core;

use std::path::PathBuf;

/// Errors at the file and process boundary.
#[derive(Debug, thiserror::Error)]
pub enum ImraError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("not an IMRA grid: first 4 bytes are {}", show_magic(.0))]
    BadMagic([u8; 4]),
    #[error("unsupported IMRA format version {0}")]
    Version(u32),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("truncated payload: expected {expected} bytes, found {got}")]
    Truncated { expected: u64, got: u64 },
    #[error("payload value {index} is NaN")]
    NanPayload { index: u64 },
    #[error("payload value {index} is infinite")]
    InfinitePayload { index: u64 },
    #[error("{0} trailing bytes after payload")]
    Trailing(u64),
    #[error("pyramid metadata: {0}")]
    Meta(String),
    #[error(transparent)]
    Core(#[from] imra_core::Error),
    #[error("{0}")]
    Validation(String),
}

impl ImraError {
    /// 2 for anything about reading or writing files, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ImraError::Core(_) | ImraError::Validation(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ImraError::Io { path: path.into(), source }
    }
}

fn show_magic(m: &[u8; 4]) -> String {
    let hex: Vec<String> = m.iter().map(|b| format!("{b:02x}")).collect();
    format!("{:?} ({})", String::from_utf8_lossy(m), hex.join(" "))
}

pub type Result<T> = std::result::Result<T, ImraError>;
