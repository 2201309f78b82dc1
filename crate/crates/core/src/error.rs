use thiserror::Error;

use crate::convex1d::Violation;

#[derive(Debug, Error)]
pub enum Error {
    /// Structurally malformed input (lengths, ordering, non-finite data).
    #[error("malformed input: {0}")]
    Malformed(String),

    /// The function breaks convexity or coercivity.
    #[error("function failed validation: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A grid section is further from convex than the repair tolerance allows.
    #[error("section at offset {offset} is not convex (gap {gap:.3e} exceeds {allowed:.3e})")]
    NonConvexSection { offset: f64, gap: f64, allowed: f64 },

    #[error("effective domain is empty")]
    EmptyDomain,

    /// The finite region reaches the grid boundary with non-negligible mass.
    #[error("integral of exp(-f) does not converge on the grid (boundary mass ratio {0:.3e})")]
    Divergent(f64),

    /// Hypothesis of an experiment (evenness) does not hold.
    #[error("function is not even: measured asymmetry {0:.3e}")]
    NotEven(f64),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
