//! Fixed-step closed-loop simulation of the engagement under the composite
//! guidance law `a_P = a_{P,n} + a_{P,d}`.
//!
//! Inertial Cartesian states are integrated (pursuer and target pose, the
//! auxiliary state, the sliding variable and the supertwisting integral) and
//! the polar quantities are derived each evaluation; this avoids the polar
//! singularity at r -> 0. The control is computed once per step and held
//! constant across the RK4 substages, mirroring a digital implementation.

use crate::error::GuidanceError;
use crate::ism::{self, SlidingState, StGains};
use crate::kinematics::{
    engagement_derivatives, relative_state, rho_ddot, wrap_angle, AccelCommand, RelativeState,
    VehicleState,
};
use crate::reference::{ManeuverProfile, ReferenceProfile, ReferenceSample};
use crate::sdre::{
    nominal_accel, AugmentedState, CareSolution, SdcSystem, SdreSolver, Weights,
    SIN_SIGMA_SINGULAR,
};
use nalgebra::Vector2;
use thiserror::Error;

/// Saturation limit matching the ±10 g actuator constraint with g = 9.81.
pub const DEFAULT_A_P_MAX: f64 = 98.1;
/// |rho| threshold defining the convergence-time metric \[m\].
pub const CONVERGENCE_DELTA: f64 = 1.0;
/// Length of the terminal averaging window for steady-state metrics \[s\].
pub const TERMINAL_WINDOW: f64 = 10.0;

/// Full simulation scenario: initial states, profiles, weights, gains and
/// integration settings. Deterministic by construction (no random inputs).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub pursuer: VehicleState,
    pub target: VehicleState,
    pub reference: ReferenceProfile,
    pub maneuver: ManeuverProfile,
    pub weights: Weights,
    pub gains: StGains,
    /// Lateral-acceleration saturation limit \[m/s²\].
    pub a_p_max: f64,
    /// Integrator step \[s\].
    pub dt: f64,
    /// Simulation horizon \[s\].
    pub horizon: f64,
    /// When false, the curvature offset g(x) is dropped from the model and
    /// silently absorbed into the unmodeled disturbance.
    pub curvature_known: bool,
}

/// The four scenarios of the reference simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinCase {
    /// Time-varying standoff, weaving target.
    Case1,
    /// Time-varying standoff, constant-velocity target.
    Case2,
    /// Constant standoff, weaving target.
    Case3,
    /// Constant standoff, stationary target (pure encirclement).
    Case4,
}

impl BuiltinCase {
    pub const ALL: [BuiltinCase; 4] = [
        BuiltinCase::Case1,
        BuiltinCase::Case2,
        BuiltinCase::Case3,
        BuiltinCase::Case4,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            BuiltinCase::Case1 => "case1",
            BuiltinCase::Case2 => "case2",
            BuiltinCase::Case3 => "case3",
            BuiltinCase::Case4 => "case4",
        }
    }
}

impl ScenarioConfig {
    /// Scenario of one of the four built-in cases: pursuer 100 m from the
    /// target at zero LOS angle, headings 20°/40°, speeds 40/10 m/s (target
    /// stationary in Case 4), standard weights and gains.
    pub fn builtin(case: BuiltinCase) -> Self {
        let pursuer = VehicleState::new(-100.0, 0.0, 20f64.to_radians(), 40.0).unwrap();
        let target = match case {
            BuiltinCase::Case4 => VehicleState::new(0.0, 0.0, 0.0, 0.0).unwrap(),
            _ => VehicleState::new(0.0, 0.0, 40f64.to_radians(), 10.0).unwrap(),
        };
        let reference = match case {
            BuiltinCase::Case1 | BuiltinCase::Case2 => ReferenceProfile::table_varying(),
            _ => ReferenceProfile::Constant { radius: 75.0 },
        };
        let maneuver = match case {
            BuiltinCase::Case1 | BuiltinCase::Case3 => ManeuverProfile::table_weaving(),
            _ => ManeuverProfile::Zero,
        };
        ScenarioConfig {
            pursuer,
            target,
            reference,
            maneuver,
            weights: Weights::standard(),
            gains: StGains::standard(),
            a_p_max: DEFAULT_A_P_MAX,
            dt: 1e-3,
            horizon: 60.0,
            curvature_known: true,
        }
    }

    /// Disturbance-free scenario starting exactly on the enclosing circle:
    /// stationary target, constant standoff, pursuer at the standoff radius
    /// with a quarter-turn look angle. Used to exercise the no-reaching-phase
    /// property without saturation transients.
    pub fn circular_orbit_start(radius: f64, v_p: f64) -> Self {
        let pursuer =
            VehicleState::new(-radius, 0.0, std::f64::consts::FRAC_PI_2, v_p).unwrap();
        let target = VehicleState::new(0.0, 0.0, 0.0, 0.0).unwrap();
        ScenarioConfig {
            pursuer,
            target,
            reference: ReferenceProfile::Constant { radius },
            maneuver: ManeuverProfile::Zero,
            weights: Weights::standard(),
            gains: StGains::standard(),
            a_p_max: DEFAULT_A_P_MAX,
            dt: 1e-3,
            horizon: 60.0,
            curvature_known: true,
        }
    }

    pub fn validate(&self) -> Result<(), GuidanceError> {
        if !(self.pursuer.v > self.target.v && self.target.v >= 0.0) {
            return Err(GuidanceError::InvalidConfig(format!(
                "need v_P > v_T >= 0, got v_P = {}, v_T = {}",
                self.pursuer.v, self.target.v
            )));
        }
        if !(self.dt > 0.0) || !(self.horizon > self.dt) {
            return Err(GuidanceError::InvalidConfig(format!(
                "need horizon > dt > 0, got dt = {}, horizon = {}",
                self.dt, self.horizon
            )));
        }
        if !(self.a_p_max > 0.0) {
            return Err(GuidanceError::InvalidConfig(
                "a_P_max must be positive".into(),
            ));
        }
        // A stationary target has no heading dynamics, so a lateral-
        // acceleration profile on it would be ignored by the plant while
        // still entering the range-error model.
        if self.target.v == 0.0 && self.maneuver != ManeuverProfile::Zero {
            return Err(GuidanceError::InvalidConfig(
                "a stationary target cannot carry a maneuver profile".into(),
            ));
        }
        self.reference.validate(self.horizon)?;
        Weights::new(self.weights.q, self.weights.r, self.weights.lambda)?;
        ism::validate_gains(&self.gains)?;
        relative_state(&self.pursuer, &self.target)?;
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

/// Instantaneous simulation state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    pub pursuer: VehicleState,
    pub target: VehicleState,
    pub eta: f64,
    pub sliding: SlidingState,
    pub t: f64,
}

/// Everything computed for one control update, exposed for logging and for
/// closed-loop diagnostics in tests.
#[derive(Debug, Clone)]
pub struct ControlDecision {
    pub rel: RelativeState,
    pub refs: ReferenceSample,
    pub a_t: f64,
    pub x: AugmentedState,
    pub sdc: SdcSystem,
    pub care: CareSolution,
    pub a_p_nominal: f64,
    pub a_p_disturbance: f64,
    pub a_p_commanded: f64,
    pub a_p_applied: f64,
    pub guard: bool,
    pub saturated: bool,
}

/// One decimated sample of the trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRecord {
    pub t: f64,
    pub pursuer_x: f64,
    pub pursuer_y: f64,
    pub pursuer_gamma: f64,
    pub target_x: f64,
    pub target_y: f64,
    pub target_gamma: f64,
    pub r: f64,
    pub theta: f64,
    pub sigma_p: f64,
    pub rho: f64,
    pub rho_dot: f64,
    pub r_d: f64,
    pub s: f64,
    pub w: f64,
    pub a_p_nominal: f64,
    pub a_p_disturbance: f64,
    pub a_p_applied: f64,
    pub a_t: f64,
    pub care_residual: f64,
    pub guard: bool,
    pub saturated: bool,
}

impl LogRecord {
    fn new(state: &SimState, d: &ControlDecision) -> Self {
        LogRecord {
            t: state.t,
            pursuer_x: state.pursuer.x,
            pursuer_y: state.pursuer.y,
            pursuer_gamma: state.pursuer.gamma,
            target_x: state.target.x,
            target_y: state.target.y,
            target_gamma: state.target.gamma,
            r: d.rel.r,
            theta: d.rel.theta,
            sigma_p: d.rel.sigma_p,
            rho: d.x.rho,
            rho_dot: d.x.rho_dot,
            r_d: d.refs.r_d,
            s: state.sliding.s,
            w: state.sliding.w,
            a_p_nominal: d.a_p_nominal,
            a_p_disturbance: d.a_p_disturbance,
            a_p_applied: d.a_p_applied,
            a_t: d.a_t,
            care_residual: d.care.residual_norm,
            guard: d.guard,
            saturated: d.saturated,
        }
    }
}

/// Uniformly sampled trajectory records.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    /// Integrator step of the run that produced the log \[s\].
    pub dt: f64,
    /// Every n-th step was recorded.
    pub decimation: usize,
    pub records: Vec<LogRecord>,
}

/// Scalar summary of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    /// First time after which |rho| stays below `CONVERGENCE_DELTA`.
    pub convergence_time: Option<f64>,
    pub max_abs_a_p: f64,
    /// Mean |rho| over the final `TERMINAL_WINDOW` seconds \[m\].
    pub terminal_mean_abs_rho: f64,
    /// Mean look angle over the final window \[rad\] (signed).
    pub terminal_mean_sigma_p: f64,
    /// Mean applied acceleration over the final window \[m/s²\] (signed).
    pub terminal_mean_a_p: f64,
    /// Fraction of steps with the command beyond the saturation limit.
    pub saturation_duty: f64,
    /// Fraction of steps with the singularity guard active.
    pub guard_duty: f64,
    pub max_care_residual: f64,
    pub max_closed_loop_abscissa: f64,
    pub max_abs_s: f64,
    pub steps: usize,
}

/// Abort carrying the partially completed log.
#[derive(Debug, Error)]
#[error("simulation aborted at t = {t:.4} s: {source}")]
pub struct RunError {
    pub t: f64,
    pub source: GuidanceError,
    pub partial_log: TrajectoryLog,
}

/// One closed-loop simulation instance. Owns all mutable state including the
/// warm-started Riccati solver; run distinct scenarios on distinct instances.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: ScenarioConfig,
    state: SimState,
    solver: SdreSolver,
    prev_a_pd: f64,
    step_index: usize,
    sat_steps: usize,
    guard_steps: usize,
    max_res: f64,
    max_abscissa: f64,
    max_abs_a: f64,
    max_abs_s: f64,
}

impl Simulation {
    pub fn new(cfg: ScenarioConfig) -> Result<Self, GuidanceError> {
        cfg.validate()?;
        let state = SimState {
            pursuer: cfg.pursuer,
            target: cfg.target,
            eta: 1.0,
            sliding: SlidingState::default(),
            t: 0.0,
        };
        Ok(Simulation {
            cfg,
            state,
            solver: SdreSolver::new(),
            prev_a_pd: 0.0,
            step_index: 0,
            sat_steps: 0,
            guard_steps: 0,
            max_res: 0.0,
            max_abscissa: f64::NEG_INFINITY,
            max_abs_a: 0.0,
            max_abs_s: 0.0,
        })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    /// Compute the control decision at the current state without advancing.
    ///
    /// Near the input singularity (|sin sigma_P| < 1e-3) the nominal channel
    /// uses a clamped sin sigma_P and the disturbance command is frozen at
    /// its previous value; singular points are isolated, so this only ever
    /// bridges a few steps.
    pub fn control_decision(&mut self) -> Result<ControlDecision, GuidanceError> {
        let cfg = &self.cfg;
        let rel = relative_state(&self.state.pursuer, &self.state.target)?;
        let refs = cfg.reference.eval(self.state.t);
        let a_t = cfg.maneuver.eval(self.state.t);
        let x = AugmentedState {
            rho: rel.r - refs.r_d,
            rho_dot: rel.v_r - refs.rdot_d,
            eta: self.state.eta,
        };
        let (sin_eff, guard) = clamp_sin_sigma(rel.sigma_p.sin());
        let theta_dot = rel.theta_dot();
        let g = refs.r_d * theta_dot * theta_dot - refs.rddot_d;
        let sdc = SdcSystem::assemble(
            theta_dot,
            sin_eff,
            g,
            self.state.eta,
            cfg.weights.lambda,
            cfg.curvature_known,
        )?;
        let care = self.solver.solve(&sdc, &cfg.weights)?;
        let a_p_nominal = nominal_accel(&care, &x);
        let a_p_disturbance = if guard {
            self.prev_a_pd
        } else {
            ism::disturbance_accel(&self.state.sliding, &sdc, &cfg.gains)?
        };
        self.prev_a_pd = a_p_disturbance;
        let a_p_commanded = a_p_nominal + a_p_disturbance;
        if !a_p_commanded.is_finite() {
            return Err(GuidanceError::NonFinite {
                quantity: "commanded acceleration",
            });
        }
        let a_p_applied = a_p_commanded.clamp(-cfg.a_p_max, cfg.a_p_max);
        Ok(ControlDecision {
            rel,
            refs,
            a_t,
            x,
            sdc,
            care,
            a_p_nominal,
            a_p_disturbance,
            a_p_commanded,
            a_p_applied,
            guard,
            saturated: a_p_commanded.abs() > cfg.a_p_max,
        })
    }

    /// Advance one step under a decision computed at the step start.
    pub fn integrate(&mut self, d: &ControlDecision) -> Result<(), GuidanceError> {
        let h = self.cfg.dt;
        let t = self.state.t;
        let y = pack(&self.state);

        let k1 = self.deriv(t, &y, d)?;
        let k2 = self.deriv(t + 0.5 * h, &add_scaled(&y, &k1, 0.5 * h), d)?;
        let k3 = self.deriv(t + 0.5 * h, &add_scaled(&y, &k2, 0.5 * h), d)?;
        let k4 = self.deriv(t + h, &add_scaled(&y, &k3, h), d)?;

        let mut next = y;
        for i in 0..STATE_DIM {
            next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if !next[i].is_finite() {
                return Err(GuidanceError::NonFinite {
                    quantity: STATE_NAMES[i],
                });
            }
        }

        self.step_index += 1;
        unpack(&mut self.state, &next);
        self.state.t = self.step_index as f64 * h;

        self.sat_steps += d.saturated as usize;
        self.guard_steps += d.guard as usize;
        self.max_res = self.max_res.max(d.care.residual_norm);
        self.max_abscissa = self.max_abscissa.max(d.care.spectral_abscissa());
        self.max_abs_a = self.max_abs_a.max(d.a_p_applied.abs());
        self.max_abs_s = self.max_abs_s.max(self.state.sliding.s.abs());
        Ok(())
    }

    /// Compute the control at the current state and advance one step.
    pub fn advance(&mut self) -> Result<ControlDecision, GuidanceError> {
        let d = self.control_decision()?;
        self.integrate(&d)?;
        Ok(d)
    }

    /// Continuous-state derivative at an RK4 substage. The pursuer command
    /// and the Riccati solution are frozen over the step; the target
    /// maneuver and the reference are exogenous and evaluated at the
    /// substage time.
    fn deriv(
        &self,
        tau: f64,
        y: &[f64; STATE_DIM],
        d: &ControlDecision,
    ) -> Result<[f64; STATE_DIM], GuidanceError> {
        let cfg = &self.cfg;
        let pursuer = VehicleState {
            x: y[0],
            y: y[1],
            gamma: y[2],
            v: cfg.pursuer.v,
        };
        let target = VehicleState {
            x: y[3],
            y: y[4],
            gamma: y[5],
            v: cfg.target.v,
        };
        let rel = relative_state(&pursuer, &target)?;
        let refs = cfg.reference.eval(tau);
        let a_t = cfg.maneuver.eval(tau);
        let u = AccelCommand {
            a_p: d.a_p_applied,
            a_t,
        };
        let rates = engagement_derivatives(&rel, &pursuer, &target, &u)?;

        let theta_dot = rates.theta_dot;
        let g = refs.r_d * theta_dot * theta_dot - refs.rddot_d;
        let (sin_eff, _) = clamp_sin_sigma(rel.sigma_p.sin());
        let sdc = SdcSystem::assemble(
            theta_dot,
            sin_eff,
            g,
            y[6],
            cfg.weights.lambda,
            cfg.curvature_known,
        )?;
        let x = AugmentedState {
            rho: rel.r - refs.r_d,
            rho_dot: rel.v_r - refs.rdot_d,
            eta: y[6],
        };
        let y_dot = Vector2::new(
            x.rho_dot,
            rho_ddot(&rel, theta_dot, &u, &target, refs.rddot_d),
        );
        let sliding = SlidingState { s: y[7], w: y[8] };
        let s_dot = ism::manifold_rate(&sdc, &d.care, &x, y_dot, &cfg.gains);
        let w_dot = ism::w_rate(&sliding, &cfg.gains);

        Ok([
            rates.pursuer_vel.0,
            rates.pursuer_vel.1,
            rates.pursuer_gamma_dot,
            rates.target_vel.0,
            rates.target_vel.1,
            rates.target_gamma_dot,
            -cfg.weights.lambda * y[6],
            s_dot,
            w_dot,
        ])
    }

    fn metrics(&self, log: &TrajectoryLog) -> RunMetrics {
        let horizon = self.cfg.horizon;
        let window_start = horizon - TERMINAL_WINDOW;
        let terminal: Vec<&LogRecord> = log
            .records
            .iter()
            .filter(|r| r.t >= window_start - 0.5 * self.cfg.dt)
            .collect();
        let n_term = terminal.len().max(1) as f64;
        let terminal_mean_abs_rho = terminal.iter().map(|r| r.rho.abs()).sum::<f64>() / n_term;
        let terminal_mean_sigma_p = terminal.iter().map(|r| r.sigma_p).sum::<f64>() / n_term;
        let terminal_mean_a_p = terminal.iter().map(|r| r.a_p_applied).sum::<f64>() / n_term;

        let convergence_time = {
            let last_violation = log
                .records
                .iter()
                .rposition(|r| r.rho.abs() >= CONVERGENCE_DELTA);
            match last_violation {
                None => log.records.first().map(|r| r.t),
                Some(idx) if idx + 1 < log.records.len() => Some(log.records[idx + 1].t),
                Some(_) => None,
            }
        };

        let steps = self.step_index;
        let denom = steps.max(1) as f64;
        RunMetrics {
            convergence_time,
            max_abs_a_p: self.max_abs_a,
            terminal_mean_abs_rho,
            terminal_mean_sigma_p,
            terminal_mean_a_p,
            saturation_duty: self.sat_steps as f64 / denom,
            guard_duty: self.guard_steps as f64 / denom,
            max_care_residual: self.max_res,
            max_closed_loop_abscissa: self.max_abscissa,
            max_abs_s: self.max_abs_s,
            steps,
        }
    }
}

const STATE_DIM: usize = 9;
const STATE_NAMES: [&str; STATE_DIM] = [
    "pursuer x",
    "pursuer y",
    "pursuer heading",
    "target x",
    "target y",
    "target heading",
    "auxiliary state",
    "sliding variable",
    "supertwisting integral",
];

fn pack(state: &SimState) -> [f64; STATE_DIM] {
    [
        state.pursuer.x,
        state.pursuer.y,
        state.pursuer.gamma,
        state.target.x,
        state.target.y,
        state.target.gamma,
        state.eta,
        state.sliding.s,
        state.sliding.w,
    ]
}

fn unpack(state: &mut SimState, y: &[f64; STATE_DIM]) {
    state.pursuer.x = y[0];
    state.pursuer.y = y[1];
    state.pursuer.gamma = wrap_angle(y[2]);
    state.target.x = y[3];
    state.target.y = y[4];
    state.target.gamma = wrap_angle(y[5]);
    state.eta = y[6];
    state.sliding.s = y[7];
    state.sliding.w = y[8];
}

fn add_scaled(
    y: &[f64; STATE_DIM],
    k: &[f64; STATE_DIM],
    h: f64,
) -> [f64; STATE_DIM] {
    let mut out = *y;
    for i in 0..STATE_DIM {
        out[i] += h * k[i];
    }
    out
}

/// Clamp `sin sigma_P` away from zero near the input singularity; the sign
/// of an exact zero is taken positive.
fn clamp_sin_sigma(raw: f64) -> (f64, bool) {
    if raw.abs() < SIN_SIGMA_SINGULAR {
        let sign = if raw >= 0.0 { 1.0 } else { -1.0 };
        (sign * SIN_SIGMA_SINGULAR, true)
    } else {
        (raw, false)
    }
}

/// Run a scenario to its horizon, logging every `log_every`-th step.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    log_every: usize,
) -> Result<(TrajectoryLog, RunMetrics), RunError> {
    let log_every = log_every.max(1);
    let mut log = TrajectoryLog {
        dt: cfg.dt,
        decimation: log_every,
        records: Vec::with_capacity(cfg.steps() / log_every + 2),
    };
    let mut sim = Simulation::new(cfg.clone()).map_err(|source| RunError {
        t: 0.0,
        source,
        partial_log: log.clone(),
    })?;

    let n = cfg.steps();
    for i in 0..n {
        let d = match sim.control_decision() {
            Ok(d) => d,
            Err(source) => {
                return Err(RunError {
                    t: sim.state.t,
                    source,
                    partial_log: log,
                })
            }
        };
        if i % log_every == 0 {
            log.records.push(LogRecord::new(&sim.state, &d));
        }
        if let Err(source) = sim.integrate(&d) {
            return Err(RunError {
                t: sim.state.t,
                source,
                partial_log: log,
            });
        }
    }
    // Terminal record with the command the law would issue at the horizon.
    match sim.control_decision() {
        Ok(d) => log.records.push(LogRecord::new(&sim.state, &d)),
        Err(source) => {
            return Err(RunError {
                t: sim.state.t,
                source,
                partial_log: log,
            })
        }
    }
    let metrics = sim.metrics(&log);
    Ok((log, metrics))
}

/// Result of the relative-degree cross-check on a full-rate log.
#[derive(Debug, Clone, Copy)]
pub struct RelDegreeReport {
    /// Interior samples that entered the comparison.
    pub samples: usize,
    /// Samples whose finite-difference rho_ddot matched the closed form.
    pub within_tol: usize,
    pub worst_rel_err: f64,
    pub tol: f64,
}

impl RelDegreeReport {
    pub fn fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.within_tol as f64 / self.samples as f64
        }
    }
}

/// Compare second central differences of the logged range error against the
/// closed-form `rho_ddot` along a full-rate log.
///
/// The fd bracket spans two control intervals, so the closed form is
/// evaluated with the average of the two applied commands; guard intervals
/// and saturation switches are excluded.
pub fn verify_relative_degree(
    log: &TrajectoryLog,
    cfg: &ScenarioConfig,
) -> Result<RelDegreeReport, GuidanceError> {
    if log.decimation != 1 {
        return Err(GuidanceError::InvalidConfig(
            "relative-degree check needs a full-rate log (decimation 1)".into(),
        ));
    }
    if log.records.len() < 3 {
        return Err(GuidanceError::InvalidConfig(
            "log too short for second differences".into(),
        ));
    }
    let tol = 1e-3;
    let dt = log.dt;
    let mut samples = 0;
    let mut within = 0;
    let mut worst = 0.0f64;
    for i in 1..log.records.len() - 1 {
        let (prev, cur, next) = (&log.records[i - 1], &log.records[i], &log.records[i + 1]);
        if prev.guard || cur.guard || next.guard {
            continue;
        }
        if prev.saturated != cur.saturated || cur.saturated != next.saturated {
            continue;
        }
        let pursuer = VehicleState {
            x: cur.pursuer_x,
            y: cur.pursuer_y,
            gamma: cur.pursuer_gamma,
            v: cfg.pursuer.v,
        };
        let target = VehicleState {
            x: cur.target_x,
            y: cur.target_y,
            gamma: cur.target_gamma,
            v: cfg.target.v,
        };
        let rel = relative_state(&pursuer, &target)?;
        let u = AccelCommand {
            a_p: 0.5 * (prev.a_p_applied + cur.a_p_applied),
            a_t: cur.a_t,
        };
        let refs = cfg.reference.eval(cur.t);
        let formula = rho_ddot(&rel, rel.theta_dot(), &u, &target, refs.rddot_d);
        let fd = (next.rho - 2.0 * cur.rho + prev.rho) / (dt * dt);
        let rel_err = (fd - formula).abs() / formula.abs().max(1.0);
        samples += 1;
        if rel_err <= tol {
            within += 1;
        }
        worst = worst.max(rel_err);
    }
    Ok(RelDegreeReport {
        samples,
        within_tol: within,
        worst_rel_err: worst,
        tol,
    })
}
