//! Integral sliding manifold and supertwisting disturbance rejection.
//!
//! The manifold integrates the gap between the measured output derivative and
//! the nominal closed-loop output dynamics, so `S(0) = 0` by construction and
//! there is no reaching phase. The design row is `L = [0, 1]`: the first row
//! of the integrand is identically zero (`y1_dot = rho_dot` on both sides),
//! and this choice makes `L C B = sin sigma_P`, matching the invertibility
//! requirement away from look angles in `{0, +-pi}`.

use crate::error::GuidanceError;
use crate::sdre::{output_matrix, AugmentedState, CareSolution, SdcSystem, SIN_SIGMA_SINGULAR};
use nalgebra::{Complex, Matrix2, RowVector2, Vector2};

/// Sliding variable and the supertwisting integral state.
///
/// Both start at zero: the manifold is an integral from time zero, and the
/// auxiliary state `w` accumulates `-alpha2 sign(S)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlidingState {
    /// Manifold value [m/s].
    pub s: f64,
    /// Supertwisting integral state [m/s²].
    pub w: f64,
}

/// Supertwisting gains and the manifold design row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StGains {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Exponent of the proportional term, in (0, 1).
    pub beta: f64,
    /// 1 x 2 design row applied to the output-space integrand.
    pub l: [f64; 2],
}

impl StGains {
    /// Standard tuning of the built-in scenarios: `alpha1 = alpha2 = 10`,
    /// `beta = 0.5`, `L = [0, 1]`.
    pub fn standard() -> Self {
        Self {
            alpha1: 10.0,
            alpha2: 10.0,
            beta: 0.5,
            l: [0.0, 1.0],
        }
    }

    fn l_row(&self) -> RowVector2<f64> {
        RowVector2::new(self.l[0], self.l[1])
    }
}

/// Diagnostic output of `validate_gains`.
#[derive(Debug, Clone, Copy)]
pub struct GainReport {
    /// Eigenvalues of `Psi = [[-alpha1/2, 1/2], [-alpha2, 0]]`.
    pub psi_eigenvalues: [Complex<f64>; 2],
}

/// `sign` with `sign(0) = 0`, as used by the supertwisting integrator.
pub fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Check positivity of the gains, the exponent range, the manifold row, and
/// that the supertwisting comparison matrix `Psi` is Hurwitz.
pub fn validate_gains(gains: &StGains) -> Result<GainReport, GuidanceError> {
    if !(gains.alpha1 > 0.0) || !(gains.alpha2 > 0.0) {
        return Err(GuidanceError::GainValidation {
            detail: format!(
                "alpha1 and alpha2 must be positive (got {}, {})",
                gains.alpha1, gains.alpha2
            ),
        });
    }
    if !(gains.beta > 0.0 && gains.beta < 1.0) {
        return Err(GuidanceError::GainValidation {
            detail: format!("beta must lie in (0, 1), got {}", gains.beta),
        });
    }
    if gains.l[1] == 0.0 {
        return Err(GuidanceError::GainValidation {
            detail: "L[1] = 0 makes L C B identically zero".into(),
        });
    }
    let psi = Matrix2::new(-0.5 * gains.alpha1, 0.5, -gains.alpha2, 0.0);
    let eigs = psi.complex_eigenvalues();
    let report = GainReport {
        psi_eigenvalues: [eigs[0], eigs[1]],
    };
    if eigs.iter().any(|e| e.re >= 0.0) {
        return Err(GuidanceError::GainValidation {
            detail: format!(
                "Psi is not Hurwitz: eigenvalues {:.6} + {:.6}i, {:.6} + {:.6}i",
                eigs[0].re, eigs[0].im, eigs[1].re, eigs[1].im
            ),
        });
    }
    Ok(report)
}

/// Scalar input map `L C B` of the manifold.
pub fn input_map(sys: &SdcSystem, gains: &StGains) -> f64 {
    (gains.l_row() * output_matrix() * sys.b)[0]
}

/// Manifold rate `L (y_dot - C (A - B R^-1 B' P) x)`.
///
/// `y_dot` is the true output derivative from the plant; the subtracted term
/// is the nominal closed-loop model at the same state.
pub fn manifold_rate(
    sys: &SdcSystem,
    sol: &CareSolution,
    x: &AugmentedState,
    y_dot: Vector2<f64>,
    gains: &StGains,
) -> f64 {
    let a_cl = sys.a - sys.b * sol.gain;
    let model = output_matrix() * a_cl * x.vector();
    (gains.l_row() * (y_dot - model))[0]
}

/// Supertwisting disturbance-rejection command
/// `[L C B]^-1 (-alpha1 |S|^beta sign(S) + w)`.
pub fn disturbance_accel(
    sliding: &SlidingState,
    sys: &SdcSystem,
    gains: &StGains,
) -> Result<f64, GuidanceError> {
    let lcb = input_map(sys, gains);
    let l_norm = (gains.l[0] * gains.l[0] + gains.l[1] * gains.l[1]).sqrt();
    if lcb.abs() < SIN_SIGMA_SINGULAR * l_norm {
        return Err(GuidanceError::SingularInput { lcb });
    }
    let s = sliding.s;
    Ok((-gains.alpha1 * s.abs().powf(gains.beta) * sign0(s) + sliding.w) / lcb)
}

/// Supertwisting integral-state rate `-alpha2 sign(S)`.
pub fn w_rate(sliding: &SlidingState, gains: &StGains) -> f64 {
    -gains.alpha2 * sign0(sliding.s)
}
