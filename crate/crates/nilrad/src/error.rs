use nilrad_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// 2 malformed input, 3 unsupported in exact arithmetic, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::Unsupported(_) | Error::NonDiagonalTorus => 3,
                Error::Internal(_) | Error::NotConverged(_) | Error::NotCertified(_) => 4,
                _ => 2,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "malformed",
            3 => "unsupported",
            _ => "internal",
        }
    }

    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Core(Error::Unsupported(_)) => Some("retry with --mode numeric"),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Malformed("x".into()).exit_code(), 2);
        let unsupported = CliError::Core(Error::Unsupported("irrational".into()));
        assert_eq!(unsupported.exit_code(), 3);
        assert_eq!(unsupported.kind(), "unsupported");
        assert!(unsupported.hint().is_some());
        assert_eq!(CliError::Core(Error::Internal("x".into())).exit_code(), 4);
    }
}
