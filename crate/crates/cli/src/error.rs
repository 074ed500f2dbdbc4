use std::fmt;

use jacobi_kit::JacobiError;
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Jacobi(JacobiError),
    NonFinite(String),
    Io(std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Jacobi(e) if e.is_domain() => 2,
            CliError::Jacobi(_) | CliError::NonFinite(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Jacobi(e) => e.kind(),
            CliError::NonFinite(_) => "non_finite",
            CliError::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::NonFinite(m) => f.write_str(m),
            CliError::Jacobi(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<JacobiError> for CliError {
    fn from(e: JacobiError) -> Self {
        CliError::Jacobi(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Jacobi(JacobiError::Domain("t".into())).exit_code(), 2);
        assert_eq!(CliError::Jacobi(JacobiError::Quadrature("q".into())).exit_code(), 3);
        assert_eq!(CliError::NonFinite("row".into()).exit_code(), 3);
        let v: serde_json::Value = serde_json::from_str(&CliError::Usage("bad".into()).to_json()).unwrap();
        assert_eq!(v["error"], "usage");
        assert_eq!(v["exit_code"], 2);
    }
}
