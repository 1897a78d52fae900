use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// The variants split into two families: configuration problems (bad
/// instance data, bad parameters, unreadable files) and runtime contract
/// violations (infeasible allocations, out-of-order feedback). The CLI maps
/// the first family to exit code 1 and the second to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("instance must have at least one arm")]
    NoArms,

    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{what} = {value} is outside {range}")]
    OutOfRange {
        what: String,
        value: f64,
        range: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("infeasible allocation: uses {used} of capacity {capacity}")]
    Infeasible { used: f64, capacity: f64 },

    #[error("feedback for round {got} but policy expected round {expected}")]
    RoundMismatch { expected: u64, got: u64 },

    #[error("round {round}: {source}")]
    AtRound {
        round: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn out_of_range(
        what: impl Into<String>,
        value: f64,
        range: impl Into<String>,
    ) -> Self {
        Error::OutOfRange {
            what: what.into(),
            value,
            range: range.into(),
        }
    }

    /// True for errors that stem from the simulation itself rather than its inputs.
    pub fn is_contract_violation(&self) -> bool {
        match self {
            Error::Infeasible { .. } | Error::RoundMismatch { .. } => true,
            Error::AtRound { source, .. } => source.is_contract_violation(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
