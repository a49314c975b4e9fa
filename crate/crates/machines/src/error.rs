use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("invalid machine: {0}")]
    InvalidSpec(String),
    #[error("symbol `{0}` is not in the input alphabet")]
    InvalidInput(String),
    #[error("malformed configuration: {0}")]
    MalformedConfiguration(String),
    #[error("configuration is halting")]
    Halting,
    #[error("no transition for state `{state}` on `{symbol}`")]
    NoTransition { state: String, symbol: String },
    #[error("branch {branch} does not exist ({available} available)")]
    NoSuchBranch { branch: usize, available: usize },
    #[error("head would move left of the tape")]
    LeftOfTape,
    #[error("head would move right of the right endmarker")]
    RightOfTape,
    #[error("the leading blank would be overwritten")]
    LeadingBlankOverwritten,
    #[error("successor length would change by two")]
    LengthJump,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}
