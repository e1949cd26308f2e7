use thiserror::Error;

/// Errors raised by the workbench.
///
/// Variants split into two families: domain errors (bad input, violated
/// preconditions) and invariant violations, which can only arise from a
/// bug in the implementation. See [`Error::is_invariant_violation`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("composition d_out * d_in is nonzero ({nonzero} entries); not a complex")]
    CompositionNonzero { nonzero: usize },
    #[error("ill-formed complex: {0}")]
    IllFormedComplex(String),
    #[error("direction mismatch: {0} vs {1}")]
    DirectionMismatch(i8, i8),
    #[error("filtration violation: {0}")]
    FiltrationViolation(String),
    #[error("unbounded filtration: {0}")]
    UnboundedFiltration(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("algebra has no unit; {0} needs one")]
    NonUnital(&'static str),
    #[error("requested degree {requested} exceeds truncation {max_n}")]
    TruncationExceeded { requested: usize, max_n: usize },
    #[error("invalid face poset: {0}")]
    InvalidPoset(String),
    #[error("corners are not embedded: {0}")]
    NonEmbeddedCorner(String),
    #[error("cell labels do not match the face poset: {0}")]
    LabelMismatch(String),
    #[error("invalid CW complex: {0}")]
    InvalidCw(String),
    #[error("not a subcomplex: {0}")]
    NotSubcomplex(String),
    #[error("local system is not flat: {0}")]
    FlatnessViolation(String),
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("window leak: {count} monomials escape the window, e.g. {examples:?}")]
    WindowLeak { count: usize, examples: Vec<String> },
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
    #[error("window incompatibility: {0}")]
    WindowIncompatible(String),
    #[error("symbol window does not reach order {needed}: floor is {floor}")]
    WindowTooShallow { needed: i32, floor: i32 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("invariant violated (bug): {0}")]
    Invariant(String),
}

impl Error {
    /// True for failures that indicate an implementation bug rather than
    /// bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }

    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::CompositionNonzero { .. } => "composition_nonzero",
            Error::IllFormedComplex(_) => "ill_formed_complex",
            Error::DirectionMismatch(..) => "direction_mismatch",
            Error::FiltrationViolation(_) => "filtration_violation",
            Error::UnboundedFiltration(_) => "unbounded_filtration",
            Error::InvalidAlgebra(_) => "invalid_algebra",
            Error::NonUnital(_) => "non_unital",
            Error::TruncationExceeded { .. } => "truncation_exceeded",
            Error::InvalidPoset(_) => "invalid_poset",
            Error::NonEmbeddedCorner(_) => "non_embedded_corner",
            Error::LabelMismatch(_) => "label_mismatch",
            Error::InvalidCw(_) => "invalid_cw",
            Error::NotSubcomplex(_) => "not_subcomplex",
            Error::FlatnessViolation(_) => "flatness_violation",
            Error::RankMismatch(_) => "rank_mismatch",
            Error::WindowLeak { .. } => "window_leak",
            Error::InvalidPatch(_) => "invalid_patch",
            Error::WindowIncompatible(_) => "window_incompatible",
            Error::WindowTooShallow { .. } => "window_too_shallow",
            Error::Parse(_) => "parse",
            Error::OutOfRange(_) => "out_of_range",
            Error::Invariant(_) => "invariant",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<crate::linalg::ParseRationalError> for Error {
    fn from(e: crate::linalg::ParseRationalError) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
