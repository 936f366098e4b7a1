use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `E[||v_k||^2] = 0` or `E[h_k^H v_k] = 0`: the UatF SINR of this UE is
    /// zero or undefined and no standard interference function exists.
    #[error("UatF-degenerate beamformer for UE {ue}: {reason}")]
    Degenerate { ue: usize, reason: &'static str },

    #[error("statistical-stage system for UE {ue} is numerically singular (condition estimate {condition:.3e})")]
    SingularSystem { ue: usize, condition: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
