//! Robust near-optimal target-enclosing guidance.
//!
//! A pursuer encloses a (possibly maneuvering) target on a prescribed,
//! possibly time-varying standoff curve `r_d(t)`, steering only through
//! lateral acceleration. The nominal command comes from a state-dependent
//! Riccati equation solved pointwise along the trajectory; an integral
//! sliding manifold with a supertwisting law rejects the unknown target
//! maneuver (and, optionally, the reference curvature itself) without a
//! reaching phase.
//!
//! Module map:
//! * [`kinematics`] — planar engagement kinematics and range-error dynamics;
//! * [`mod@reference`] — standoff and target-maneuver profiles with exact
//!   derivatives;
//! * [`riccati`] — dense CARE solver (Hamiltonian subspace + Newton-Kleinman);
//! * [`sdre`] — pseudo-linear model, pointwise feedback, rank diagnostics;
//! * [`ism`] — sliding manifold and supertwisting disturbance rejection;
//! * [`simulator`] — fixed-step closed-loop runs, logging and metrics.

// Negated comparisons in validation code are deliberate: they must reject
// NaN, which the suggested `<=` rewrites would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ism;
pub mod kinematics;
pub mod reference;
pub mod riccati;
pub mod sdre;
pub mod simulator;

pub use error::GuidanceError;
