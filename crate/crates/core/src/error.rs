use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable lists do not match: {0} vs {1} variables")]
    MismatchedVariables(usize, usize),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("negative coordinate exponent not allowed here (flat geometry, or non-height variable)")]
    LaurentNotAllowed,

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("division by the zero function")]
    DivisionByZero,

    #[error("denominator vanishes on the spectrum: s={s}, k={k}, dim={dim}")]
    DenominatorSingularOnSpectrum { s: u32, k: u32, dim: u32 },

    #[error("box symbol not permitted in a spectral function application")]
    BoxSymbolPresent,

    #[error("tensors belong to different geometries")]
    GeometryMismatch,

    #[error("evaluation point outside the upper half-space: y = {0}")]
    EvalAtBoundary(String),

    #[error("trajectory left the upper half-space: y = {0}")]
    BoundaryCrossing(f64),

    #[error("depth reassembly failed to reproduce the input")]
    ReassemblyFailed,

    #[error("operator defined on flat geometry only")]
    FlatOnly,

    #[error("invalid flags: {0}")]
    InvalidFlags(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag, used by the CLI's structured stderr.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MismatchedVariables(..) => "mismatched_variables",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::LaurentNotAllowed => "laurent_not_allowed",
            Error::Parse { .. } => "parse",
            Error::DivisionByZero => "division_by_zero",
            Error::DenominatorSingularOnSpectrum { .. } => "denominator_singular_on_spectrum",
            Error::BoxSymbolPresent => "box_symbol_present",
            Error::GeometryMismatch => "geometry_mismatch",
            Error::EvalAtBoundary(_) => "eval_at_boundary",
            Error::BoundaryCrossing(_) => "boundary_crossing",
            Error::ReassemblyFailed => "reassembly_failed",
            Error::FlatOnly => "flat_only",
            Error::InvalidFlags(_) => "invalid_flags",
        }
    }
}
