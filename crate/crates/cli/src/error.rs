use edgegas::asymptotics::AsymError;
use edgegas::electrostatics::ElectroError;
use edgegas::ensemble::McError;
use edgegas::numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Accuracy(String),
    #[error("{0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Accuracy(_) => 4,
            CliError::Verification(_) => 5,
        }
    }
}

impl From<ElectroError> for CliError {
    fn from(e: ElectroError) -> Self {
        match e {
            ElectroError::Domain(_) => CliError::Usage(e.to_string()),
            ElectroError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            ElectroError::Numerics(n) => n.into(),
        }
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::Domain(_) => CliError::Usage(e.to_string()),
            _ => CliError::Accuracy(e.to_string()),
        }
    }
}

impl From<AsymError> for CliError {
    fn from(e: AsymError) -> Self {
        match e {
            AsymError::Domain(_) => CliError::Usage(e.to_string()),
            AsymError::InfeasibleDual { .. } => CliError::Infeasible(e.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Usage(_) => CliError::Usage(e.to_string()),
            McError::Construction(_) => CliError::Infeasible(e.to_string()),
            McError::Incomplete { .. } => CliError::Accuracy(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {e}"))
    }
}
