use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("path error: {0}")]
    Path(String),
    #[error(transparent)]
    Model(#[from] gaugeqed::Error),
    #[error("self-test failed: {0} check(s) red")]
    Selftest(usize),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        use gaugeqed::Error as E;
        ExitCode::from(match self {
            CliError::Selftest(_) => 1,
            CliError::Config(_) => 2,
            CliError::Path(_) => 3,
            CliError::Model(e) => match e {
                E::Config(_) | E::UnsupportedParameter(_) | E::Resonance(_) => 2,
                E::Convergence { .. } | E::UnconvergedLevel { .. } | E::Truncation(_) | E::StepSize { .. } => 4,
                _ => 5,
            },
        })
    }
}
