use std::path::Path;

use cond_hardy::HardyError;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    /// A library failure, tagged with the operation that raised it.
    #[error("{operation}: {source}")]
    Solver {
        operation: &'static str,
        source: HardyError,
    },
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 4,
            CliError::Io { .. } => 1,
            CliError::Solver { source, .. } => match source {
                HardyError::CompatibilityViolated(_) | HardyError::CompatibilityUnreachable => 2,
                HardyError::NoConvergence { .. }
                | HardyError::SingularSystem(_)
                | HardyError::SolverFailure(_)
                | HardyError::ZeroField
                | HardyError::GridMismatch
                | HardyError::PointTooCloseToBoundary(_) => 3,
                _ => 4,
            },
        }
    }

    pub fn report(&self) -> ErrorReport {
        let (operation, kind) = match self {
            CliError::Config(_) => ("config", "ConfigError".to_string()),
            CliError::Io { .. } => ("output", "IoError".to_string()),
            CliError::Solver { operation, source } => (*operation, kind_name(source)),
        };
        ErrorReport {
            operation: operation.to_string(),
            kind,
            message: self.to_string(),
            exit_code: self.exit_code(),
        }
    }
}

/// Variant name of a library error.
fn kind_name(e: &HardyError) -> String {
    let s = format!("{e:?}");
    s.split(['(', ' ', '{']).next().unwrap_or("").to_string()
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub operation: String,
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

/// Tags library errors with the operation name.
pub trait Context<T> {
    fn during(self, operation: &'static str) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, HardyError> {
    fn during(self, operation: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Solver { operation, source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_class() {
        let s = |e| CliError::Solver {
            operation: "x",
            source: e,
        };
        assert_eq!(
            s(HardyError::CompatibilityViolated(vec![1.0])).exit_code(),
            2
        );
        assert_eq!(
            s(HardyError::NoConvergence {
                iterations: 3,
                residual: 1.0
            })
            .exit_code(),
            3
        );
        assert_eq!(s(HardyError::MeanNotZero(1.0)).exit_code(), 4);
        assert_eq!(
            s(HardyError::BudgetUnreachable {
                budget: 1.0,
                infimum: 2.0
            })
            .exit_code(),
            4
        );
        assert_eq!(CliError::Config("x".into()).exit_code(), 4);
    }

    #[test]
    fn kinds_are_variant_names() {
        assert_eq!(kind_name(&HardyError::MeanNotZero(1.0)), "MeanNotZero");
        assert_eq!(
            kind_name(&HardyError::KappaViolated {
                found: 1.0,
                kappa: 0.5
            }),
            "KappaViolated"
        );
        assert_eq!(kind_name(&HardyError::ZeroField), "ZeroField");
    }
}
