use thiserror::Error;

/// Failures with dedicated exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    SearchFailed(String),
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAPACITY: u8 = 3;
pub const EXIT_SEARCH_FAILED: u8 = 4;

pub fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<CliError>() {
        return match e {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::SearchFailed(_) => EXIT_SEARCH_FAILED,
        };
    }
    match err.downcast_ref::<cliffsynth::Error>() {
        Some(cliffsynth::Error::Capacity(_)) => EXIT_CAPACITY,
        Some(
            cliffsynth::Error::InvalidQubitCount { .. }
            | cliffsynth::Error::InvalidConfig(_)
            | cliffsynth::Error::InvalidMoveSet(_)
            | cliffsynth::Error::InvalidFidelity(_),
        ) => EXIT_USAGE,
        _ => EXIT_ERROR,
    }
}
