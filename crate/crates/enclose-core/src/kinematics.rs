//! Planar point-mass engagement kinematics.
//!
//! Both vehicles are constant-speed point masses steered by lateral
//! acceleration. The line-of-sight (LOS) angle `theta` is the inertial angle
//! of the ray from pursuer to target, which makes the polar relative-motion
//! equations hold with their textbook signs: at zero look angle the pursuer
//! closes at `-v_P + v_T cos(gamma_T - theta)`.

use crate::error::GuidanceError;
use std::f64::consts::PI;

/// Separations below this are treated as a collision/degenerate geometry.
pub const MIN_SEPARATION: f64 = 1e-9;

/// Wrap an angle to the half-open interval `(-pi, pi]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a - 2.0 * PI
    } else {
        a
    }
}

/// Inertial planar pose and (constant) speed of one point-mass vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    /// Position east \[m\].
    pub x: f64,
    /// Position north \[m\].
    pub y: f64,
    /// Heading angle \[rad\], wrapped to `(-pi, pi]`.
    pub gamma: f64,
    /// Speed \[m/s\]; zero is allowed for a stationary target.
    pub v: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, gamma: f64, v: f64) -> Result<Self, GuidanceError> {
        if !(x.is_finite() && y.is_finite() && gamma.is_finite() && v.is_finite()) {
            return Err(GuidanceError::InvalidConfig(
                "vehicle state must be finite".into(),
            ));
        }
        if v < 0.0 {
            return Err(GuidanceError::InvalidConfig(format!(
                "vehicle speed must be non-negative, got {v}"
            )));
        }
        Ok(Self {
            x,
            y,
            gamma: wrap_angle(gamma),
            v,
        })
    }
}

/// Target-referenced polar engagement variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeState {
    /// Pursuer-target separation \[m\].
    pub r: f64,
    /// LOS angle of the pursuer-to-target ray \[rad\], in `(-pi, pi]`.
    pub theta: f64,
    /// Pursuer look angle `gamma_P - theta` \[rad\], in `(-pi, pi]`.
    pub sigma_p: f64,
    /// Range rate \[m/s\].
    pub v_r: f64,
    /// Transverse relative speed `r * theta_dot` \[m/s\].
    pub v_theta: f64,
}

impl RelativeState {
    /// LOS rate `theta_dot = v_theta / r` \[rad/s\].
    pub fn theta_dot(&self) -> f64 {
        self.v_theta / self.r
    }
}

/// Lateral acceleration commands for both vehicles \[m/s²\].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AccelCommand {
    pub a_p: f64,
    pub a_t: f64,
}

/// Time derivatives of the engagement state under a given command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngagementRates {
    pub r_dot: f64,
    pub theta_dot: f64,
    pub pursuer_gamma_dot: f64,
    pub target_gamma_dot: f64,
    /// Inertial velocity (x_dot, y_dot) of the pursuer.
    pub pursuer_vel: (f64, f64),
    /// Inertial velocity (x_dot, y_dot) of the target.
    pub target_vel: (f64, f64),
}

/// Polar engagement variables for a pursuer/target pair.
///
/// `v_r = v_T cos(gamma_T - theta) - v_P cos(sigma_P)` and
/// `v_theta = v_T sin(gamma_T - theta) - v_P sin(sigma_P)`.
pub fn relative_state(
    pursuer: &VehicleState,
    target: &VehicleState,
) -> Result<RelativeState, GuidanceError> {
    let dx = target.x - pursuer.x;
    let dy = target.y - pursuer.y;
    let r = dx.hypot(dy);
    if r < MIN_SEPARATION {
        return Err(GuidanceError::DegenerateGeometry { r });
    }
    let theta = dy.atan2(dx);
    let sigma_p = wrap_angle(pursuer.gamma - theta);
    let target_bearing = wrap_angle(target.gamma - theta);
    let v_r = target.v * target_bearing.cos() - pursuer.v * sigma_p.cos();
    let v_theta = target.v * target_bearing.sin() - pursuer.v * sigma_p.sin();
    Ok(RelativeState {
        r,
        theta,
        sigma_p,
        v_r,
        v_theta,
    })
}

/// Full set of engagement state derivatives under commanded accelerations.
///
/// A stationary target (`v = 0`) has no heading dynamics regardless of `a_T`.
pub fn engagement_derivatives(
    rel: &RelativeState,
    pursuer: &VehicleState,
    target: &VehicleState,
    u: &AccelCommand,
) -> Result<EngagementRates, GuidanceError> {
    if rel.r <= 0.0 {
        return Err(GuidanceError::DegenerateGeometry { r: rel.r });
    }
    let target_gamma_dot = if target.v > 0.0 { u.a_t / target.v } else { 0.0 };
    Ok(EngagementRates {
        r_dot: rel.v_r,
        theta_dot: rel.v_theta / rel.r,
        pursuer_gamma_dot: u.a_p / pursuer.v,
        target_gamma_dot,
        pursuer_vel: (
            pursuer.v * pursuer.gamma.cos(),
            pursuer.v * pursuer.gamma.sin(),
        ),
        target_vel: (target.v * target.gamma.cos(), target.v * target.gamma.sin()),
    })
}

/// Closed-form second derivative of the range error,
/// `rho_ddot = r theta_dot² + a_P sin(sigma_P) - a_T sin(gamma_T - theta) - rddot_d`.
///
/// The range error has relative degree two in `a_P`: the command enters here
/// and nowhere in the first derivative.
pub fn rho_ddot(
    rel: &RelativeState,
    theta_dot: f64,
    u: &AccelCommand,
    target: &VehicleState,
    rddot_d: f64,
) -> f64 {
    let target_bearing = wrap_angle(target.gamma - rel.theta);
    rel.r * theta_dot * theta_dot + u.a_p * rel.sigma_p.sin()
        - u.a_t * target_bearing.sin()
        - rddot_d
}
