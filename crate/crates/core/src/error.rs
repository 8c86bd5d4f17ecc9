use thiserror::Error;

use crate::structures::Violation;
use crate::unfolding::Axiom;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration count exceeds cap of {cap}")]
    ConfigExplosion { cap: usize },

    #[error("search for {what} exceeds cap of {cap}")]
    SearchExplosion { what: &'static str, cap: usize },

    #[error("structure has {count} events; at most {max} are supported")]
    TooManyEvents { count: usize, max: usize },

    #[error("expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("visible set is not closed under equivalence (missing {missing:?})")]
    NotEquivClosed { missing: Vec<String> },

    #[error("equivalence family is not stable")]
    NotStable,

    #[error("structural axiom {0} fails")]
    AxiomsFailed(Axiom),

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("duplicate event `{0}`")]
    DuplicateEvent(String),

    #[error("invalid structure: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Whether the error reports an exhausted enumeration budget.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::ConfigExplosion { .. }
                | Error::SearchExplosion { .. }
                | Error::TooManyEvents { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
