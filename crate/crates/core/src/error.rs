use thiserror::Error;

use crate::tree::{NodePath, SpaceKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("node {top} is not an ancestor of {bottom}")]
    NotAChain { top: NodePath, bottom: NodePath },

    #[error("node {node} is not a valid {space} node: {reason}")]
    InvalidNode { node: NodePath, space: SpaceKind, reason: String },

    #[error("enumeration cap exceeded: {what} count {count} > {cap}")]
    CapExceeded { what: &'static str, count: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameter constraint violated: {0}")]
    Constraint(String),

    #[error("functional uses level {needed} but level cap is {cap}")]
    LevelCap { needed: usize, cap: usize },

    #[error("cutting plane did not converge after {iterations} cuts (gap {gap})")]
    NoConvergence { iterations: usize, gap: String },

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("certificate check failed: {0}")]
    Certificate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case tag for machine-readable reports.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Error::NotAChain { .. } => "not_a_chain",
            Error::InvalidNode { .. } => "invalid_node",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Precondition(_) => "precondition",
            Error::Constraint(_) => "constraint",
            Error::LevelCap { .. } => "level_cap",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Unbounded => "unbounded",
            Error::Certificate(_) => "certificate",
            Error::Parse(_) => "parse",
            Error::Unsupported(_) => "unsupported",
        }
    }
}
