//! Pseudo-linear (state-dependent coefficient) model of the range-error
//! dynamics, the pointwise Riccati feedback, and the rank diagnostics that
//! certify output stabilizability and state detectability.
//!
//! The augmented state is `x = [rho, rho_dot, eta]`. The auxiliary state
//! `eta` decays as `eta_dot = -Lambda * eta` and carries the non-vanishing
//! reference-curvature offset `g = r_d theta_dot^2 - rddot_d` through the
//! `g / eta` column, so the drift factors exactly as `A(x) x`.

use crate::error::GuidanceError;
use crate::kinematics::RelativeState;
use crate::reference::ReferenceSample;
use crate::riccati;
use nalgebra::{Complex, DMatrix, Matrix2, Matrix3, RowVector3, SMatrix, Vector3};

/// Conditioning floor for the auxiliary state.
pub const ETA_FLOOR: f64 = 1e-3;
/// Look angles with |sin sigma_P| below this count as input singularities.
pub const SIN_SIGMA_SINGULAR: f64 = 1e-3;
/// Singular values below `RANK_TOL * sigma_max` count as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Output matrix `C = [I2 0]`: the regulated output is `(rho, rho_dot)`.
pub fn output_matrix() -> SMatrix<f64, 2, 3> {
    SMatrix::<f64, 2, 3>::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0)
}

/// Cost weights of the pointwise LQ problem plus the auxiliary decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    /// Output weight, symmetric positive semidefinite.
    pub q: Matrix2<f64>,
    /// Control weight, positive.
    pub r: f64,
    /// Auxiliary-state decay rate \[1/s\], small and positive.
    pub lambda: f64,
}

impl Weights {
    pub fn diagonal(q_rho: f64, q_rho_dot: f64, r: f64, lambda: f64) -> Result<Self, GuidanceError> {
        Self::new(Matrix2::new(q_rho, 0.0, 0.0, q_rho_dot), r, lambda)
    }

    pub fn new(q: Matrix2<f64>, r: f64, lambda: f64) -> Result<Self, GuidanceError> {
        let sym_err = (q - q.transpose()).norm();
        if sym_err > 1e-12 * q.norm().max(1.0) {
            return Err(GuidanceError::InvalidConfig("Q must be symmetric".into()));
        }
        let min_eig = q
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-12 * q.norm().max(1.0) {
            return Err(GuidanceError::InvalidConfig(
                "Q must be positive semidefinite".into(),
            ));
        }
        if !(r > 0.0) {
            return Err(GuidanceError::InvalidConfig(format!(
                "control weight R must be positive, got {r}"
            )));
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(GuidanceError::InvalidConfig(format!(
                "auxiliary decay Lambda must lie in (0, 1), got {lambda}"
            )));
        }
        Ok(Self { q, r, lambda })
    }

    /// Standard tuning of the built-in scenarios:
    /// `Q = diag(1e8, 1e8)`, `R = 4e4`, `Lambda = 0.01`.
    pub fn standard() -> Self {
        Self::diagonal(1e8, 1e8, 4e4, 0.01).expect("standard weights are valid")
    }

    /// `C' Q C` lifted to the augmented state.
    pub fn output_cost(&self) -> Matrix3<f64> {
        let c = output_matrix();
        c.transpose() * self.q * c
    }
}

/// Augmented state `[rho, rho_dot, eta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentedState {
    /// Range error r - r_d \[m\].
    pub rho: f64,
    /// Range-error rate \[m/s\].
    pub rho_dot: f64,
    /// Auxiliary state (dimensionless).
    pub eta: f64,
}

impl AugmentedState {
    pub fn vector(&self) -> Vector3<f64> {
        Vector3::new(self.rho, self.rho_dot, self.eta)
    }
}

/// Pointwise pseudo-linear system matrices at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdcSystem {
    /// `A = [[0, 1, 0], [theta_dot^2, 0, g/eta], [0, 0, -Lambda]]`.
    pub a: Matrix3<f64>,
    /// `B = [0, sin sigma_P, 0]`.
    pub b: Vector3<f64>,
    /// The `g(x) / eta` coupling entry (zero when curvature is treated as
    /// unknown and folded into the disturbance).
    pub g_entry: f64,
    pub theta_dot: f64,
    pub sin_sigma: f64,
}

impl SdcSystem {
    /// Assemble the matrices from raw ingredients. `sin_sigma` is taken as
    /// given so callers may clamp it near the input singularity.
    pub fn assemble(
        theta_dot: f64,
        sin_sigma: f64,
        g: f64,
        eta: f64,
        lambda: f64,
        curvature_known: bool,
    ) -> Result<Self, GuidanceError> {
        if eta.abs() < ETA_FLOOR {
            return Err(GuidanceError::AuxiliaryStateCollapse {
                eta,
                floor: ETA_FLOOR,
            });
        }
        let g_entry = if curvature_known { g / eta } else { 0.0 };
        let a = Matrix3::new(
            0.0,
            1.0,
            0.0,
            theta_dot * theta_dot,
            0.0,
            g_entry,
            0.0,
            0.0,
            -lambda,
        );
        let b = Vector3::new(0.0, sin_sigma, 0.0);
        Ok(Self {
            a,
            b,
            g_entry,
            theta_dot,
            sin_sigma,
        })
    }
}

/// Build the pseudo-linear model at the current relative state and reference
/// sample, with `g = r_d theta_dot^2 - rddot_d`.
pub fn build_sdc(
    rel: &RelativeState,
    refs: &ReferenceSample,
    eta: f64,
    weights: &Weights,
    curvature_known: bool,
) -> Result<SdcSystem, GuidanceError> {
    let theta_dot = rel.theta_dot();
    let g = refs.r_d * theta_dot * theta_dot - refs.rddot_d;
    SdcSystem::assemble(
        theta_dot,
        rel.sigma_p.sin(),
        g,
        eta,
        weights.lambda,
        curvature_known,
    )
}

/// Stabilizing Riccati solution at one state, with the derived feedback row.
#[derive(Debug, Clone, PartialEq)]
pub struct CareSolution {
    pub p: Matrix3<f64>,
    /// Feedback row `R^-1 B' P`, so the nominal command is `-gain * x`.
    pub gain: RowVector3<f64>,
    /// Relative Riccati residual of `p`.
    pub residual_norm: f64,
    /// Eigenvalues of the closed loop `A - B R^-1 B' P`.
    pub closed_loop_eigs: [Complex<f64>; 3],
}

impl CareSolution {
    pub fn spectral_abscissa(&self) -> f64 {
        self.closed_loop_eigs
            .iter()
            .map(|e| e.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Solve the pointwise Riccati equation for `sys`.
///
/// Away from the input singularity the cold Hamiltonian route needs no help;
/// near it a warm start is required for the pencil to stay tractable.
pub fn solve_care(
    sys: &SdcSystem,
    weights: &Weights,
    warm: Option<&Matrix3<f64>>,
) -> Result<CareSolution, GuidanceError> {
    if sys.sin_sigma.abs() < SIN_SIGMA_SINGULAR && warm.is_none() {
        return Err(GuidanceError::SingularGeometry {
            sin_sigma: sys.sin_sigma,
        });
    }
    let a = DMatrix::from_fn(3, 3, |i, j| sys.a[(i, j)]);
    let b = DMatrix::from_fn(3, 1, |i, _| sys.b[i]);
    let q = weights.output_cost();
    let qd = DMatrix::from_fn(3, 3, |i, j| q[(i, j)]);
    let r = DMatrix::from_element(1, 1, weights.r);
    let warm_d = warm.map(|p| DMatrix::from_fn(3, 3, |i, j| p[(i, j)]));

    let sol = riccati::solve(&a, &b, &qd, &r, warm_d.as_ref())?;
    let p = Matrix3::from_fn(|i, j| sol.p[(i, j)]);
    let gain = RowVector3::from_fn(|_, j| (sys.b.transpose() * p)[(0, j)] / weights.r);
    let a_cl = sys.a - sys.b * gain;
    let eigs = a_cl.complex_eigenvalues();
    Ok(CareSolution {
        p,
        gain,
        residual_norm: sol.residual,
        closed_loop_eigs: [eigs[0], eigs[1], eigs[2]],
    })
}

/// Per-trajectory Riccati solver that warm-starts each solve from the last
/// accepted solution. One instance per simulation; do not share across runs.
#[derive(Debug, Default, Clone)]
pub struct SdreSolver {
    warm: Option<Matrix3<f64>>,
}

impl SdreSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(
        &mut self,
        sys: &SdcSystem,
        weights: &Weights,
    ) -> Result<CareSolution, GuidanceError> {
        let sol = solve_care(sys, weights, self.warm.as_ref())?;
        self.warm = Some(sol.p);
        Ok(sol)
    }
}

/// Nominal feedback command `-R^-1 B' P x`.
pub fn nominal_accel(sol: &CareSolution, x: &AugmentedState) -> f64 {
    -(sol.gain * x.vector())[0]
}

/// Rank of the output controllability matrix `[CB  CAB  CA^2B]` (2 x 3).
///
/// Full rank 2 everywhere except at look angles in `{0, +-pi}` where the
/// input matrix vanishes.
pub fn output_controllability_rank(sys: &SdcSystem) -> usize {
    let c = output_matrix();
    let cb = c * sys.b;
    let cab = c * sys.a * sys.b;
    let ca2b = c * sys.a * sys.a * sys.b;
    let oc = SMatrix::<f64, 2, 3>::from_columns(&[cb, cab, ca2b]);
    numerical_rank(oc.svd(false, false).singular_values.as_slice())
}

/// Rank of the state detectability matrix `[Q; QA; QA^2]` (9 x 3) with
/// `Q = sqrt(C' Q C)` (principal PSD square root).
pub fn state_detectability_rank(sys: &SdcSystem, weights: &Weights) -> usize {
    let q_sqrt = psd_sqrt(&weights.output_cost());
    let mut oo = SMatrix::<f64, 9, 3>::zeros();
    oo.fixed_view_mut::<3, 3>(0, 0).copy_from(&q_sqrt);
    oo.fixed_view_mut::<3, 3>(3, 0).copy_from(&(q_sqrt * sys.a));
    oo.fixed_view_mut::<3, 3>(6, 0)
        .copy_from(&(q_sqrt * sys.a * sys.a));
    numerical_rank(oo.svd(false, false).singular_values.as_slice())
}

/// Principal square root of a symmetric PSD matrix (negative eigenvalues from
/// roundoff are clamped to zero).
pub fn psd_sqrt(m: &Matrix3<f64>) -> Matrix3<f64> {
    let eig = m.symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    eig.eigenvectors * Matrix3::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose()
}

fn numerical_rank(singular_values: &[f64]) -> usize {
    let max = singular_values.iter().copied().fold(0.0, f64::max);
    // The tolerance is anchored at the O(1) natural scale of these matrices
    // as well as at sigma_max: the controllability matrix is proportional to
    // sin sigma_P, so a purely relative decision would report full rank even
    // at sigma_P = pi where sin evaluates to 1.2e-16 instead of an exact 0.
    let threshold = RANK_TOL * max.max(1.0);
    singular_values.iter().filter(|&&s| s > threshold).count()
}
