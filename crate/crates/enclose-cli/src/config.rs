//! Scenario-file schema.
//!
//! The TOML layout mirrors `ScenarioConfig` one to one, plus output options.
//! Every physical quantity carries its unit in the key name, and unknown
//! keys are rejected wholesale.

use enclose_core::ism::StGains;
use enclose_core::kinematics::VehicleState;
use enclose_core::reference::{ManeuverProfile, Phase, ReferenceProfile, SinusoidTerm};
use enclose_core::sdre::Weights;
use enclose_core::simulator::{ScenarioConfig, DEFAULT_A_P_MAX};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub pursuer: VehicleSection,
    pub target: VehicleSection,
    pub reference: ReferenceSection,
    pub maneuver: ManeuverSection,
    #[serde(default)]
    pub weights: WeightsSection,
    #[serde(default)]
    pub gains: GainsSection,
    #[serde(default)]
    pub limits: LimitsSection,
    #[serde(default)]
    pub integration: IntegrationSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSection {
    pub x_m: f64,
    pub y_m: f64,
    pub heading_rad: f64,
    pub speed_mps: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSection {
    Constant {
        radius_m: f64,
    },
    SinusoidalSum {
        base_m: f64,
        terms: Vec<TermSection>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSection {
    pub amplitude_m: f64,
    pub frequency_radps: f64,
    /// "sin" or "cos".
    pub phase: PhaseSection,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseSection {
    Sin,
    Cos,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManeuverSection {
    Zero,
    Constant {
        value_mps2: f64,
    },
    ProductSinusoid {
        bias_mps2: f64,
        scale_mps2: f64,
        cos_frequency_radps: f64,
        sin_frequency_radps: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub q_rho: f64,
    pub q_rho_dot: f64,
    pub r_accel: f64,
    pub lambda_per_s: f64,
}

impl Default for WeightsSection {
    fn default() -> Self {
        WeightsSection {
            q_rho: 1e8,
            q_rho_dot: 1e8,
            r_accel: 4e4,
            lambda_per_s: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSection {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub manifold_row: [f64; 2],
}

impl Default for GainsSection {
    fn default() -> Self {
        GainsSection {
            alpha1: 10.0,
            alpha2: 10.0,
            beta: 0.5,
            manifold_row: [0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsSection {
    pub a_p_max_mps2: f64,
}

impl Default for LimitsSection {
    fn default() -> Self {
        LimitsSection {
            a_p_max_mps2: DEFAULT_A_P_MAX,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSection {
    pub dt_s: f64,
    pub horizon_s: f64,
    pub curvature_known: bool,
}

impl Default for IntegrationSection {
    fn default() -> Self {
        IntegrationSection {
            dt_s: 1e-3,
            horizon_s: 60.0,
            curvature_known: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Log every n-th integrator step.
    #[serde(default = "default_decimation")]
    pub decimation: usize,
    /// Trajectory CSV file name (relative to the output directory);
    /// defaults to `<scenario>_trajectory.csv`.
    #[serde(default)]
    pub csv: Option<String>,
    /// Metrics file name; defaults to `<scenario>_metrics.txt`.
    #[serde(default)]
    pub metrics: Option<String>,
}

fn default_decimation() -> usize {
    10
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            decimation: 10,
            csv: None,
            metrics: None,
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Convert to a validated core config plus the output options.
    pub fn into_config(self) -> anyhow::Result<(ScenarioConfig, OutputSection)> {
        let pursuer = VehicleState::new(
            self.pursuer.x_m,
            self.pursuer.y_m,
            self.pursuer.heading_rad,
            self.pursuer.speed_mps,
        )?;
        let target = VehicleState::new(
            self.target.x_m,
            self.target.y_m,
            self.target.heading_rad,
            self.target.speed_mps,
        )?;
        let reference = match self.reference {
            ReferenceSection::Constant { radius_m } => ReferenceProfile::Constant {
                radius: radius_m,
            },
            ReferenceSection::SinusoidalSum { base_m, terms } => ReferenceProfile::SinusoidalSum {
                base: base_m,
                terms: terms
                    .into_iter()
                    .map(|t| SinusoidTerm {
                        amplitude: t.amplitude_m,
                        frequency: t.frequency_radps,
                        phase: match t.phase {
                            PhaseSection::Sin => Phase::Sin,
                            PhaseSection::Cos => Phase::Cos,
                        },
                    })
                    .collect(),
            },
        };
        let maneuver = match self.maneuver {
            ManeuverSection::Zero => ManeuverProfile::Zero,
            ManeuverSection::Constant { value_mps2 } => ManeuverProfile::Constant {
                value: value_mps2,
            },
            ManeuverSection::ProductSinusoid {
                bias_mps2,
                scale_mps2,
                cos_frequency_radps,
                sin_frequency_radps,
            } => ManeuverProfile::ProductSinusoid {
                bias: bias_mps2,
                scale: scale_mps2,
                cos_frequency: cos_frequency_radps,
                sin_frequency: sin_frequency_radps,
            },
        };
        let weights = Weights::diagonal(
            self.weights.q_rho,
            self.weights.q_rho_dot,
            self.weights.r_accel,
            self.weights.lambda_per_s,
        )?;
        let gains = StGains {
            alpha1: self.gains.alpha1,
            alpha2: self.gains.alpha2,
            beta: self.gains.beta,
            l: self.gains.manifold_row,
        };
        let cfg = ScenarioConfig {
            pursuer,
            target,
            reference,
            maneuver,
            weights,
            gains,
            a_p_max: self.limits.a_p_max_mps2,
            dt: self.integration.dt_s,
            horizon: self.integration.horizon_s,
            curvature_known: self.integration.curvature_known,
        };
        cfg.validate()?;
        let mut output = self.output;
        output.decimation = output.decimation.max(1);
        Ok((cfg, output))
    }
}
