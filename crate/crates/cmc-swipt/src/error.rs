//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Which of the two radio links an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    LongRange,
    ShortRange,
}

impl std::fmt::Display for Link {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Link::LongRange => write!(f, "long-range"),
            Link::ShortRange => write!(f, "short-range"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A link cannot carry data: the rate is zero (infinite duration) or the
    /// minimum rate is unreachable under the transmit power cap.
    #[error("infeasible {link} link: {constraint}")]
    InfeasibleLink { link: Link, constraint: String },

    /// Every candidate terminal was excluded; carries one reason per candidate.
    #[error("no feasible candidate terminal: {reasons:?}")]
    AllCandidatesInfeasible { reasons: Vec<(usize, String)> },

    /// Ratio solver ran out of iterations; carries the (q, F(q)) iterates seen.
    #[error("ratio solver did not converge within {max_iterations} iterations (last |F| = {last_residual:.3e})")]
    NonConvergence {
        max_iterations: usize,
        last_residual: f64,
        iterates: Vec<(f64, f64)>,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Exhaustive search would exceed the evaluation budget.
    #[error("search budget exceeded: {required} evaluations requested, cap is {cap}")]
    BudgetExceeded { required: u128, cap: u128 },

    #[error("baseline energy must be positive, got {0}")]
    ZeroBaseline(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
