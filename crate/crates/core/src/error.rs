use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("Deslauriers-Dubuc order {0} unsupported (expected 1..=16)")]
    OrderUnsupported(u32),
    #[error("invalid interpolating filter at index {index}: {reason}")]
    InvalidFilterAt { index: i64, reason: &'static str },
    #[error("invalid interpolating filter: {0}")]
    InvalidFilter(&'static str),
    #[error("resolution {resolution} exceeds the supported maximum {max}")]
    ResolutionTooLarge { resolution: u32, max: u32 },
    #[error("table at resolution {resolution} would hold {entries} entries")]
    Resource { resolution: u32, entries: u64 },
    #[error("resolution error: {0}")]
    Resolution(&'static str),
    #[error("dimension {0} out of range")]
    DimensionOutOfRange(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("level {0} out of range")]
    LevelOutOfRange(i32),
    #[error("empty box")]
    EmptyBox,
    #[error("grid payload holds {got} values, box needs {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at flat index {0}")]
    NonFinite(usize),
    #[error("axis {axis}: coarse box empty at level {level}")]
    LevelTooDeep { axis: usize, level: i32 },
    #[error("axis {axis}: {reason}")]
    Shape { axis: usize, reason: &'static str },
    #[error("sample evaluation failed at lattice point index {0}")]
    Evaluation(usize),
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    #[error("arithmetic overflow in exact computation")]
    Overflow,
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

pub type Result<T> = core::result::Result<T, Error>;
