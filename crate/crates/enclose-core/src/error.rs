//! Error types shared across the guidance library.

use thiserror::Error;

/// Errors raised by the guidance and simulation layers.
#[derive(Debug, Clone, Error)]
pub enum GuidanceError {
    /// Pursuer and target are (numerically) coincident; polar engagement
    /// variables are undefined.
    #[error("degenerate geometry: separation {r} m is too small")]
    DegenerateGeometry { r: f64 },

    /// The auxiliary state decayed below the conditioning floor, so the
    /// g(x)/eta column of the pseudo-linear model is no longer trustworthy.
    #[error("auxiliary state collapse: |eta| = {eta:.3e} below floor {floor:.1e}")]
    AuxiliaryStateCollapse { eta: f64, floor: f64 },

    /// The input channel vanished (look angle at 0 or ±pi) and no warm start
    /// was available, so no stabilizing Riccati solution exists.
    #[error("singular geometry: |sin sigma_P| = {sin_sigma:.3e} gives an uncontrollable range channel")]
    SingularGeometry { sin_sigma: f64 },

    /// L*C*B is too close to zero to invert for the disturbance-rejection
    /// command.
    #[error("singular input map: |L C B| = {lcb:.3e} below invertibility threshold")]
    SingularInput { lcb: f64 },

    /// The Riccati solver did not reach the required residual.
    #[error("Riccati solver failure ({detail}); relative residual {residual:.3e}")]
    SolverFailure { residual: f64, detail: String },

    /// Supertwisting gain set fails the Hurwitz/positivity requirements.
    #[error("gain validation failed: {detail}")]
    GainValidation { detail: String },

    /// A state or command stopped being a number mid-run.
    #[error("non-finite value in {quantity}")]
    NonFinite { quantity: &'static str },

    /// A scenario or profile violates its declared invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
