use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid machine space: {0}")]
    InvalidSpace(String),

    #[error("machine space produced no tallied halting outputs")]
    DegenerateSpace,

    #[error("table is {table}D but pattern is {pattern}D")]
    DimensionMismatch { table: u8, pattern: u8 },

    #[error("pattern outside table coverage: {0}")]
    Coverage(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("malformed table file: {0}")]
    MalformedTable(String),

    #[error("unsupported table version `{0}`")]
    TableVersion(String),

    #[error("table checksum mismatch (header {expected}, body {actual})")]
    Checksum { expected: String, actual: String },

    #[error("empty signal")]
    EmptySignal,

    #[error("block length {block_len} invalid for signal of {len} bits")]
    BlockLength { block_len: usize, len: usize },

    #[error("grid {rows}x{cols} is smaller than the 4x4 window")]
    GridTooSmall { rows: usize, cols: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("character {ch:?} at index {index} needs more than one UTF-8 byte")]
    MultiByte { ch: char, index: usize },

    #[error("indicator encodings cannot be inverted")]
    NonInvertible,

    #[error("balanced integrity violated at character index {0}")]
    BalancedIntegrity(usize),

    #[error("signal of {len} bits is not a multiple of {unit}")]
    Misaligned { len: usize, unit: usize },

    #[error("invalid encoding scheme: {0}")]
    InvalidScheme(String),

    #[error("flip count {k} exceeds signal length {len}")]
    FlipCount { k: usize, len: usize },

    #[error("invalid segment boundaries: {0}")]
    Boundaries(String),

    #[error("invalid experiment plan: {0}")]
    Plan(String),

    #[error("{0} requires at least one value")]
    EmptyInput(&'static str),

    #[error("spike window {window} invalid for landscape of {len} points")]
    SpikeWindow { window: usize, len: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
