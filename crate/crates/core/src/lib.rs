//! Numerical laboratory for continuous-time models of accelerated gradient
//! methods.
//!
//! The crate has four layers:
//!
//! * [`problems`] — smooth convex test objectives with verified metadata
//!   (smoothness constant, strong convexity, minimizer) and oracle
//!   self-checks.
//! * [`dynamics`] — the damped-flow ODE families, a reference integrator
//!   with dense output and co-integrated accumulator channels, and
//!   terminal-time extrapolation for the anti-vanishing damping family.
//! * [`conservation`] — dilated-coordinate transforms, the catalog of
//!   conservation laws and Lyapunov functions along those flows, closed-form
//!   rate bounds, and numeric certificates for all of them.
//! * [`discrete`] — the discrete methods (momentum-form gradient schemes and
//!   their gradient-norm counterparts), their per-iteration Lyapunov
//!   certificates, and discrete↔continuous correspondence checks.

// validations are written as !(x > 0.0) on purpose: the negation rejects
// NaN parameters along with out-of-range ones
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conservation;
pub mod discrete;
pub mod dynamics;
pub mod error;
pub mod problems;

pub use error::{Error, Result};
