use std::path::PathBuf;

use distharm_core::Error as CoreError;

/// Every check passed.
pub const EXIT_OK: i32 = 0;
/// At least one check failed.
pub const EXIT_FAIL: i32 = 1;
/// Bad arguments, unreadable or invalid scene, inapplicable check.
pub const EXIT_USAGE: i32 = 2;
/// Evaluation left the domain of the geometry (degenerate metric, point
/// outside the scene, singular branch of the radial ODE).
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    /// A scene that does not validate; always a configuration error.
    #[error("scene {origin}: {source}")]
    Scene { origin: String, source: CoreError },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    SceneJson {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
