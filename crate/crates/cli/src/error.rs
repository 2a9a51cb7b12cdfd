use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(ancilla::Error),
    Output(String),
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numeric(_) => 3,
            Self::ChecksFailed(_) => 4,
            Self::Output(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(msg) => write!(f, "config error: {msg}"),
            Self::Numeric(e) => write!(f, "numerical failure: {e}"),
            Self::Output(msg) => write!(f, "output error: {msg}"),
            Self::ChecksFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ancilla::Error> for CliError {
    fn from(e: ancilla::Error) -> Self {
        Self::Numeric(e)
    }
}
