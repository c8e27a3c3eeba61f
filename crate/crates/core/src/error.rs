use thiserror::Error;

use crate::trees::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid tree {tree}: {}", fmt_violations(.violations))]
    InvalidTree {
        tree: String,
        violations: Vec<Violation>,
    },

    #[error("tree count exceeds resource cap of {cap}")]
    ResourceCap { cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernels live on different lattices or cutoffs: {0}")]
    Mismatch(String),

    #[error("tree degree {degree} exceeds cutoff {cutoff}")]
    DegreeExceedsCutoff { degree: usize, cutoff: usize },

    #[error("generator has degree {0} terms; composition would not terminate")]
    NonTerminating(usize),

    #[error("internal cross-check failed: {0}")]
    Inconsistent(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
