use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {input:?} as a decimal real")]
    Parse { input: String },

    #[error("precision {0} bits is below the 53-bit minimum")]
    InvalidPrecision(u32),

    #[error("square root of negative operand {0}")]
    NegativeOperand(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {n} outside the family domain (tabulated through n = {len})")]
    DomainExceeded { n: usize, len: usize },

    #[error("right coefficient sigma(n, +1) vanishes at n = {n}; the equation cannot be solved forward")]
    SigmaRightZero { n: usize },

    #[error("division by zero: x_{n} = 0")]
    DivisionByZero { n: usize },

    #[error("sequence too short: {len} terms, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("shooting is not applicable: sigma(n, +1) = 0 at n = {n}")]
    NotApplicable { n: usize },

    #[error("no closed-form limits available for family {0}")]
    NoClosedForm(String),

    #[error("escalation exhausted after {escalations} escalations (N = {steps}, P = {precision} bits): {reason}")]
    EscalationExhausted {
        escalations: u32,
        steps: usize,
        precision: u32,
        reason: String,
    },

    #[error("quadrature did not converge after {levels} levels (last difference {last_difference})")]
    NoConvergence { levels: u32, last_difference: String },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigInvalid(_)
            | Error::Parse { .. }
            | Error::InvalidPrecision(_)
            | Error::Io(_)
            | Error::Csv(_) => 1,
            Error::EscalationExhausted { .. } | Error::NoConvergence { .. } => 3,
            _ => 2,
        }
    }
}
