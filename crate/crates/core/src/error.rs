use thiserror::Error;

/// Errors raised by window computations.
///
/// Verdicts (PASS/FAIL, EQUAL/DIFFER) are never errors; these cover
/// malformed input, violated preconditions and exhausted resources.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unsupported rank {rank} for {group}")]
    UnsupportedRank { group: String, rank: i64 },

    #[error("malformed element for {group}: {detail}")]
    MalformedElement { group: String, detail: String },

    #[error("resource limit: {what} needs more than {cap} elements")]
    ResourceLimit { what: String, cap: usize },

    #[error("space mismatch: expected {expected}, found {found}")]
    SpaceMismatch { expected: String, found: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("map is not surjective on the window: {element} has no preimage within radius {radius}")]
    SurjectivityViolation { element: String, radius: usize },

    #[error("window overflow: {0}")]
    WindowOverflow(String),

    #[error("window underflow: {0}")]
    WindowUnderflow(String),

    #[error("actions do not commute at g={g}, h={h}, x={x}")]
    CommutativityViolation { g: String, h: String, x: String },

    #[error("not a group action: {0}")]
    NotAnAction(String),

    #[error("search failure: {0}")]
    SearchFailure(String),

    #[error("cover failure: no cover of size <= {cap} ({detail})")]
    CoverFailure { cap: usize, detail: String },

    #[error("enumeration guard: {candidates} candidate tables exceed cap {cap}")]
    ExplosionGuard { candidates: u128, cap: u128 },
}

impl Error {
    /// Stable machine-readable code, surfaced in CLI reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::UnsupportedRank { .. } => "unsupported-rank",
            Error::MalformedElement { .. } => "malformed-element",
            Error::ResourceLimit { .. } => "resource-limit",
            Error::SpaceMismatch { .. } => "space-mismatch",
            Error::Precondition(_) => "precondition-violation",
            Error::SurjectivityViolation { .. } => "surjectivity-violation",
            Error::WindowOverflow(_) => "window-overflow",
            Error::WindowUnderflow(_) => "window-underflow",
            Error::CommutativityViolation { .. } => "commutativity-violation",
            Error::NotAnAction(_) => "not-an-action",
            Error::SearchFailure(_) => "search-failure",
            Error::CoverFailure { .. } => "cover-failure",
            Error::ExplosionGuard { .. } => "explosion-guard",
        }
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
