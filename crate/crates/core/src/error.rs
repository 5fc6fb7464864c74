use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of measurement construction and signal recovery.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed caller input: wrong lengths, out-of-range parameters, bad files.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested sampling design is degenerate and cannot be built.
    #[error("invalid design: {0}")]
    InvalidDesign(String),

    /// The measured signal gets too close to zero somewhere on the unit
    /// circle, so the moment integrand is not trustworthy there.
    #[error("signal too small on the unit circle: sampled |f|^2 reached {min_g0:.6e} (floor {floor:.6e})")]
    SignalTooSmall { min_g0: f64, floor: f64 },

    /// The zeroth moment landed too far from every integer to count roots.
    #[error("ambiguous root count: mu_0 = {mu0:.6} is {residual:.4} away from the nearest admissible integer (threshold {threshold})")]
    AmbiguousRootCount {
        mu0: f64,
        residual: f64,
        threshold: f64,
    },

    /// The assembled factor product vanished, so the output cannot be normalized.
    #[error("degenerate normalization: recovered factor product has zero norm")]
    DegenerateNorm,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures that stem from the data (noise level, conditioning)
    /// rather than from caller mistakes; the CLI reports these and exits 1.
    pub fn is_recoverable(&self) -> bool {
        matches!(
            self,
            Error::SignalTooSmall { .. } | Error::AmbiguousRootCount { .. } | Error::DegenerateNorm
        )
    }
}
