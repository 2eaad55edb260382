//! Standoff-distance and target-maneuver profiles.
//!
//! Profiles are closed-form families (constants and sinusoid sums) so that
//! first and second derivatives are exact; sampled derivatives would leak
//! error into the pseudo-linear model, which needs a C² reference.

use crate::error::GuidanceError;

/// Sampling rate used when hunting profile extrema over a horizon [Hz].
const EXTREMA_SAMPLE_HZ: f64 = 1000.0;

/// Which trigonometric function a sinusoid term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Sin,
    Cos,
}

/// One `amplitude * sin/cos(frequency * t)` term of a reference profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidTerm {
    pub amplitude: f64,
    /// Angular frequency \[rad/s\].
    pub frequency: f64,
    pub phase: Phase,
}

/// Commanded standoff distance r_d(t) \[m\].
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceProfile {
    Constant { radius: f64 },
    SinusoidalSum { base: f64, terms: Vec<SinusoidTerm> },
}

/// Reference value with its analytic derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSample {
    pub r_d: f64,
    pub rdot_d: f64,
    pub rddot_d: f64,
}

impl ReferenceProfile {
    /// Time-varying standoff profile of the built-in Cases 1 and 2:
    /// `75 + 2 sin(t) + 15 cos(t)`.
    pub fn table_varying() -> Self {
        ReferenceProfile::SinusoidalSum {
            base: 75.0,
            terms: vec![
                SinusoidTerm {
                    amplitude: 2.0,
                    frequency: 1.0,
                    phase: Phase::Sin,
                },
                SinusoidTerm {
                    amplitude: 15.0,
                    frequency: 1.0,
                    phase: Phase::Cos,
                },
            ],
        }
    }

    /// Evaluate `(r_d, rdot_d, rddot_d)` at time `t`, term by term.
    pub fn eval(&self, t: f64) -> ReferenceSample {
        match self {
            ReferenceProfile::Constant { radius } => ReferenceSample {
                r_d: *radius,
                rdot_d: 0.0,
                rddot_d: 0.0,
            },
            ReferenceProfile::SinusoidalSum { base, terms } => {
                let mut sample = ReferenceSample {
                    r_d: *base,
                    rdot_d: 0.0,
                    rddot_d: 0.0,
                };
                for term in terms {
                    let w = term.frequency;
                    let (s, c) = (w * t).sin_cos();
                    let (value, d1, d2) = match term.phase {
                        Phase::Sin => (s, w * c, -w * w * s),
                        Phase::Cos => (c, -w * s, -w * w * c),
                    };
                    sample.r_d += term.amplitude * value;
                    sample.rdot_d += term.amplitude * d1;
                    sample.rddot_d += term.amplitude * d2;
                }
                sample
            }
        }
    }

    /// Check `r_d(t) > 0` over the horizon by dense sampling.
    pub fn validate(&self, horizon: f64) -> Result<(), GuidanceError> {
        let (min, _) = sample_range(horizon, |t| self.eval(t).r_d);
        if min <= 0.0 {
            return Err(GuidanceError::InvalidConfig(format!(
                "reference profile reaches r_d = {min:.3} m; standoff must stay positive"
            )));
        }
        Ok(())
    }
}

/// Target lateral-acceleration profile a_T(t) \[m/s²\].
#[derive(Debug, Clone, PartialEq)]
pub enum ManeuverProfile {
    Zero,
    Constant { value: f64 },
    /// `bias + scale * cos(cos_frequency t) * sin(sin_frequency t)`.
    ProductSinusoid {
        bias: f64,
        scale: f64,
        cos_frequency: f64,
        sin_frequency: f64,
    },
}

impl ManeuverProfile {
    /// Weaving maneuver of the built-in Cases 1 and 3:
    /// `1.5 - 5 cos(0.2 pi t) sin(0.1 pi t)`.
    pub fn table_weaving() -> Self {
        ManeuverProfile::ProductSinusoid {
            bias: 1.5,
            scale: -5.0,
            cos_frequency: 0.2 * std::f64::consts::PI,
            sin_frequency: 0.1 * std::f64::consts::PI,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ManeuverProfile::Zero => 0.0,
            ManeuverProfile::Constant { value } => *value,
            ManeuverProfile::ProductSinusoid {
                bias,
                scale,
                cos_frequency,
                sin_frequency,
            } => bias + scale * (cos_frequency * t).cos() * (sin_frequency * t).sin(),
        }
    }

    /// Largest |a_T| over the horizon, by dense sampling.
    pub fn max_abs(&self, horizon: f64) -> f64 {
        let (min, max) = sample_range(horizon, |t| self.eval(t));
        min.abs().max(max.abs())
    }
}

/// Conservative bound on the unmodeled-disturbance magnitude when the
/// reference curvature is folded into the disturbance channel:
/// `a_T_max + r_d_max (v_P + v_T)^2 + rddot_d_max`.
///
/// Extrema are found by dense sampling over the horizon. The value is for
/// reporting the expected ultimate bound; it plays no role in the control.
pub fn disturbance_bound(
    profile: &ReferenceProfile,
    maneuver: &ManeuverProfile,
    v_p: f64,
    v_t: f64,
    horizon: f64,
) -> f64 {
    let a_t_max = maneuver.max_abs(horizon);
    let (_, r_d_max) = sample_range(horizon, |t| profile.eval(t).r_d);
    let (lo, hi) = sample_range(horizon, |t| profile.eval(t).rddot_d);
    let rddot_max = lo.abs().max(hi.abs());
    let closing = v_p + v_t;
    a_t_max + r_d_max * closing * closing + rddot_max
}

/// (min, max) of `f` sampled at 1 kHz over `[0, horizon]`, endpoints included.
fn sample_range(horizon: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = (horizon * EXTREMA_SAMPLE_HZ).ceil().max(1.0) as usize;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for i in 0..=n {
        let t = horizon * i as f64 / n as f64;
        let v = f(t);
        min = min.min(v);
        max = max.max(v);
    }
    (min, max)
}
