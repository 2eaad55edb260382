//! Continuous algebraic Riccati equation solver for small dense systems.
//!
//! `solve` finds the symmetric positive-semidefinite stabilizing solution of
//!
//! ```text
//! A' P + P A - P B R^-1 B' P + Q = 0
//! ```
//!
//! Two routes are provided and cross-checked by the test suite:
//!
//! * a cold start that extracts the stable invariant subspace of the
//!   2n x 2n Hamiltonian matrix from its eigen decomposition, and
//! * a warm-started Newton-Kleinman iteration (one Lyapunov solve per step)
//!   that exploits temporal coherence when the equation is re-solved along a
//!   trajectory.
//!
//! The cold result is always polished by a few Newton steps, so both routes
//! terminate at the same fixed point. The caller receives the relative
//! residual `||A'P + PA - PSP + Q||_F / max(1, ||Q||_F)` for every solve.

use crate::error::GuidanceError;
use nalgebra::{Complex, DMatrix, DVector};

/// Solves are rejected if the relative residual stays above this.
pub const ACCEPT_RESIDUAL: f64 = 1e-9;
/// Newton iterations aim for this residual before stopping early.
const NEWTON_TARGET: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 40;
/// Hamiltonian eigenvalues with |Re| below `AXIS_TOL * ||H||` are treated as
/// lying on the imaginary axis (no stabilizing solution).
const AXIS_TOL: f64 = 1e-10;

/// Outcome of a successful CARE solve.
#[derive(Debug, Clone)]
pub struct Solution {
    pub p: DMatrix<f64>,
    /// Relative residual of the returned `p`.
    pub residual: f64,
    /// Newton iterations spent (zero if the warm start was already converged).
    pub newton_iterations: usize,
    /// True when the Hamiltonian cold start was used.
    pub cold_start: bool,
}

/// Relative CARE residual of a candidate solution.
pub fn residual(
    a: &DMatrix<f64>,
    s: &DMatrix<f64>,
    q: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> f64 {
    let res = a.transpose() * p + p * a - p * s * p + q;
    res.norm() / q.norm().max(1.0)
}

/// Largest real part of the eigenvalues of `m`.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Solve the CARE, preferring a Newton iteration from `warm` when the warm
/// start stabilizes the current pencil, and falling back to the Hamiltonian
/// subspace method otherwise.
pub fn solve(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    warm: Option<&DMatrix<f64>>,
) -> Result<Solution, GuidanceError> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "A must be square");
    assert_eq!(b.nrows(), n, "B must have as many rows as A");
    assert_eq!(q.shape(), (n, n), "Q must match A");
    assert_eq!(r.shape(), (b.ncols(), b.ncols()), "R must match B columns");

    let r_inv = r.clone().try_inverse().ok_or_else(|| GuidanceError::SolverFailure {
        residual: f64::NAN,
        detail: "control weight R is singular".into(),
    })?;
    let s = b * r_inv * b.transpose();

    if let Some(p0) = warm {
        if spectral_abscissa(&(a - &s * p0)) < 0.0 {
            if let Ok((p, iters)) = newton_kleinman(a, &s, q, p0.clone()) {
                let res = residual(a, &s, q, &p);
                if res <= ACCEPT_RESIDUAL {
                    return Ok(Solution {
                        p,
                        residual: res,
                        newton_iterations: iters,
                        cold_start: false,
                    });
                }
            }
        }
    }

    let p_cold = hamiltonian_stable_solution(a, &s, q)?;
    let (p, iters) = newton_kleinman(a, &s, q, p_cold)?;
    let res = residual(a, &s, q, &p);
    if res > ACCEPT_RESIDUAL {
        return Err(GuidanceError::SolverFailure {
            residual: res,
            detail: "cold solve did not reach the required residual".into(),
        });
    }
    Ok(Solution {
        p,
        residual: res,
        newton_iterations: iters,
        cold_start: true,
    })
}

/// Stabilizing solution from the stable invariant subspace of the Hamiltonian
/// `H = [[A, -S], [-Q, -A']]`, via its eigen decomposition.
///
/// The equation is rescaled (`P = c * P_hat`) before forming `H` so that the
/// `S` and `Q` blocks have comparable norms; the benchmark-scale weights put nine
/// orders of magnitude between them otherwise.
pub fn hamiltonian_stable_solution(
    a: &DMatrix<f64>,
    s: &DMatrix<f64>,
    q: &DMatrix<f64>,
) -> Result<DMatrix<f64>, GuidanceError> {
    let n = a.nrows();
    let s_norm = s.norm();
    let q_norm = q.norm();
    let scale = if s_norm > 0.0 && q_norm > 0.0 {
        (q_norm / s_norm).sqrt()
    } else {
        1.0
    };

    let mut h = DMatrix::<f64>::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(-s * scale));
    h.view_mut((n, 0), (n, n)).copy_from(&(-q / scale));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let h_norm = h.norm().max(1.0);
    let eigenvalues = h.complex_eigenvalues();
    let mut stable: Vec<Complex<f64>> = eigenvalues
        .iter()
        .copied()
        .filter(|e| e.re < -AXIS_TOL * h_norm)
        .collect();
    if stable.len() != n {
        return Err(GuidanceError::SolverFailure {
            residual: f64::NAN,
            detail: format!(
                "Hamiltonian has {} stable eigenvalues, expected {n}; pair not stabilizable/detectable",
                stable.len()
            ),
        });
    }
    stable.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());

    // Group (near-)repeated stable eigenvalues so each group contributes an
    // orthonormal chunk of the invariant subspace instead of n copies of the
    // same singular vector.
    let cluster_tol = 1e-8 * h_norm;
    let hc = h.map(|v| Complex::new(v, 0.0));
    let mut basis = DMatrix::<Complex<f64>>::zeros(2 * n, n);
    let mut col = 0;
    let mut i = 0;
    while i < stable.len() {
        let mut j = i + 1;
        while j < stable.len() && (stable[j] - stable[i]).norm() <= cluster_tol {
            j += 1;
        }
        let count = j - i;
        let center = stable[i..j].iter().sum::<Complex<f64>>() / count as f64;
        let vectors = null_space_vectors(&hc, center, count)?;
        for v in vectors {
            basis.set_column(col, &v);
            col += 1;
        }
        i = j;
    }

    let u1 = basis.view((0, 0), (n, n)).into_owned();
    let u2 = basis.view((n, 0), (n, n)).into_owned();
    let u1_inv = u1.try_inverse().ok_or_else(|| GuidanceError::SolverFailure {
        residual: f64::NAN,
        detail: "stable subspace basis is not a graph over the state space".into(),
    })?;
    let p_hat = u2 * u1_inv;
    let p_real = p_hat.map(|v| v.re);
    Ok(symmetrize(&p_real) * scale)
}

/// The `count` right singular vectors of `(H - lambda I)` with the smallest
/// singular values: an orthonormal basis of the eigenspace at `lambda`.
fn null_space_vectors(
    hc: &DMatrix<Complex<f64>>,
    lambda: Complex<f64>,
    count: usize,
) -> Result<Vec<DVector<Complex<f64>>>, GuidanceError> {
    let dim = hc.nrows();
    let mut shifted = hc.clone();
    for k in 0..dim {
        shifted[(k, k)] -= lambda;
    }
    let svd = shifted
        .try_svd(false, true, f64::EPSILON, 1000)
        .ok_or_else(|| GuidanceError::SolverFailure {
            residual: f64::NAN,
            detail: "SVD of shifted Hamiltonian did not converge".into(),
        })?;
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| {
        svd.singular_values[x]
            .partial_cmp(&svd.singular_values[y])
            .unwrap()
    });
    Ok(order[..count]
        .iter()
        .map(|&k| v_t.row(k).adjoint())
        .collect())
}

/// Newton-Kleinman iteration from a stabilizing start: each step solves one
/// Lyapunov equation with the current closed-loop matrix. Quadratically
/// convergent; returns the iterate count together with the solution.
pub fn newton_kleinman(
    a: &DMatrix<f64>,
    s: &DMatrix<f64>,
    q: &DMatrix<f64>,
    p0: DMatrix<f64>,
) -> Result<(DMatrix<f64>, usize), GuidanceError> {
    let mut p = symmetrize(&p0);
    let mut last_res = residual(a, s, q, &p);
    for iter in 0..NEWTON_MAX_ITER {
        if last_res <= NEWTON_TARGET {
            return Ok((p, iter));
        }
        let a_cl = a - s * &p;
        let rhs = q + &p * s * &p;
        let next = symmetrize(&lyapunov(&a_cl, &rhs)?);
        let res = residual(a, s, q, &next);
        if !res.is_finite() {
            return Err(GuidanceError::SolverFailure {
                residual: res,
                detail: "Newton iteration diverged".into(),
            });
        }
        // Stalled: quadratic convergence has flattened out at the attainable
        // floor. Keep the better iterate and let the caller judge.
        if res >= 0.5 * last_res {
            return if res <= last_res {
                Ok((next, iter + 1))
            } else {
                Ok((p, iter))
            };
        }
        p = next;
        last_res = res;
    }
    Ok((p, NEWTON_MAX_ITER))
}

/// Solve `A_cl' X + X A_cl + W = 0` through the Kronecker-product linear
/// system; fine for the n <= 3 systems used here.
pub fn lyapunov(a_cl: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>, GuidanceError> {
    let n = a_cl.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let at = a_cl.transpose();
    let k = eye.kronecker(&at) + at.kronecker(&eye);
    let rhs = DVector::from_column_slice(w.as_slice());
    let x = k.lu().solve(&(-rhs)).ok_or_else(|| GuidanceError::SolverFailure {
        residual: f64::NAN,
        detail: "Lyapunov operator is singular (closed loop has mirrored eigenvalues)".into(),
    })?;
    Ok(DMatrix::from_column_slice(n, n, x.as_slice()))
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}
