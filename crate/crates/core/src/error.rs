use thiserror::Error;

use crate::algebra::{Block, PartTag};
use crate::operators::{Segment, Window};

/// Every failure the library reports.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: left is {left:?}, right is {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("block {block:?} of a 2x2 element: {detail}")]
    BlockMismatch { block: &'static str, detail: String },

    #[error("element of shape {shape:?} cannot carry part {part:?}")]
    WrongPart { part: PartTag, shape: (usize, usize) },

    #[error("{what} does not lie in {part:?} (off-part mass {residual:e})")]
    NotInPart {
        what: String,
        part: PartTag,
        residual: f64,
    },

    #[error("symbol of block {block:?} cannot act on {segment}")]
    NotComposable { block: Block, segment: String },

    #[error("window {given} too small, image needs {required}")]
    WindowTooSmall { required: Window, given: Window },

    #[error("basis mismatch: {left} vs {right}")]
    BasisMismatch { left: String, right: String },

    #[error("element has mass {mass:e} outside {segment:?}")]
    OutsideSegment { segment: Segment, mass: f64 },

    #[error("{what} is singular (condition number {condition:e})")]
    Singular { what: String, condition: f64 },

    #[error("conditions violated: {detail}")]
    ConditionsViolated { detail: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("instance mismatch: {0}")]
    Instance(String),

    #[error("no well-conditioned instance after {attempts} draws (p={p}, q={q}, degree={degree})")]
    RetriesExhausted {
        attempts: usize,
        p: usize,
        q: usize,
        degree: usize,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
