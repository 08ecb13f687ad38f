use thiserror::Error;

/// Errors raised across the toolkit. Variants map onto the CLI's "domain
/// error" exit status.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    Field(String),
    #[error("no inverse of zero")]
    ZeroInverse,
    #[error("entry not in prime field: {entry} >= {p} at row {row}, column {col}")]
    EntryOutOfField {
        entry: u32,
        p: u32,
        row: usize,
        col: usize,
    },
    #[error("mismatched ambient space: {0}")]
    AmbientMismatch(String),
    #[error("not a proper extension: target dimension {target} <= subspace dimension {dim}")]
    NotProperExtension { dim: usize, target: usize },
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("duplicate block at line {line}")]
    DuplicateBlock { line: usize },
    #[error("projective version needs t >= 2 (got t = {0})")]
    ProjectiveNeedsT2(usize),
    #[error("affine version needs t >= 2 (got t = {0})")]
    AffineNeedsT2(usize),
    #[error("flats construction requires q = 2 (got q = {0})")]
    FlatsNeedQ2(u32),
    #[error("exhaustive search refused: dimension {dim} exceeds cap {cap}")]
    SearchRefused { dim: usize, cap: usize },
    #[error("decoder input: {0}")]
    DecodeInput(String),
    #[error("two-step needs k >= 3 (got k = {0})")]
    TwoStepNeedsK3(usize),
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
