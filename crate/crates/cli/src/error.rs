use szbounds::ScatterError;
use thiserror::Error;

/// Exit status: 1 verification failed, 2 computation failed, 3 bad input or I/O.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source}")]
    Scatter { source: ScatterError, context: String },

    #[error("{message}")]
    Input { message: String, context: String },

    #[error("{source}")]
    Io { source: std::io::Error, context: String },

    #[error("{summary}")]
    VerifyFailed { summary: String, context: String },
}

impl CliError {
    pub fn input(message: impl Into<String>, context: impl Into<String>) -> Self {
        CliError::Input {
            message: message.into(),
            context: context.into(),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Scatter { source, .. } => source.code(),
            CliError::Input { .. } => "UsageError",
            CliError::Io { .. } => "IoError",
            CliError::VerifyFailed { .. } => "VerifyFailed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Scatter {
                source: ScatterError::Config(_),
                ..
            }
            | CliError::Input { .. }
            | CliError::Io { .. } => 3,
            CliError::Scatter { .. } => 2,
        }
    }

    fn context(&self) -> &str {
        match self {
            CliError::Scatter { context, .. }
            | CliError::Input { context, .. }
            | CliError::Io { context, .. }
            | CliError::VerifyFailed { context, .. } => context,
        }
    }

    /// `error code=<Code> message="..." context="..."` on one line.
    pub fn diagnostic(&self) -> String {
        format!(
            "error code={} message=\"{}\" context=\"{}\"",
            self.code(),
            quote(&self.to_string()),
            quote(self.context())
        )
    }
}

fn quote(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace(['\n', '\r'], " ")
}

/// Attaches a context string to fallible results.
pub trait Context<T> {
    fn ctx(self, context: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, ScatterError> {
    fn ctx(self, context: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Scatter {
            source,
            context: context.to_string(),
        })
    }
}

impl<T> Context<T> for Result<T, std::io::Error> {
    fn ctx(self, context: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Io {
            source,
            context: context.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostic_is_one_line_and_escaped() {
        let e = CliError::input("bad \"x\"\nvalue", "compute");
        let d = e.diagnostic();
        assert!(!d.contains('\n'));
        assert!(d.starts_with("error code=UsageError message=\"bad \\\"x\\\" value\""));
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn engine_errors_exit_two() {
        let e: Result<(), _> = Err(ScatterError::NoPropagatingMode {
            energy: 0.1,
            asymptote: 1.0,
        });
        let e = e.ctx("compute").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert_eq!(e.code(), "NoPropagatingMode");
    }
}
