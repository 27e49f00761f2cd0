use crate::sidecar::SidecarError;

/// Failure of a CLI command, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, missing or malformed input files. Exit code 2.
    #[error("{0}")]
    Config(String),
    /// A numerical routine failed. Exit code 3.
    #[error("solver failure: {0}")]
    Solver(tlbt_core::Error),
    /// Output could not be written. Exit code 1.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<tlbt_core::Error> for CliError {
    fn from(e: tlbt_core::Error) -> Self {
        use tlbt_core::Error as E;
        match e {
            E::InvalidConfig(_) | E::InvalidWindow | E::DimensionMismatch(_) | E::NonFinite => {
                CliError::Config(e.to_string())
            }
            other => CliError::Solver(other),
        }
    }
}

impl From<SidecarError> for CliError {
    fn from(e: SidecarError) -> Self {
        match e {
            SidecarError::Core(c) => c.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(CliError::from(tlbt_core::Error::InvalidWindow).exit_code(), 2);
        let rd = tlbt_core::Error::RankDeficient {
            requested: 3,
            available: 1,
        };
        assert_eq!(CliError::from(rd).exit_code(), 3);
        assert_eq!(CliError::from(SidecarError::Invalid("x".into())).exit_code(), 2);
    }
}
