//! Time-dependent Hamiltonian of the canonical dilated frame.
//!
//! With W = t²(X − X★) and conjugate momentum P = Ẇ/t, the Hamiltonian
//! H(W, P, t) = (t/2)‖P‖² + t³(f(X(W,t)) − f★) generates the flow but is not
//! conserved: along trajectories dH/dt equals the explicit partial ∂H/∂t.

use nalgebra::DVector;

use super::frame::conjugate_momentum;
use crate::dynamics::{OdeFamily, Trajectory};
use crate::error::{Error, Result};
use crate::problems::Objective;

/// One evaluation of the Hamiltonian identity along a trajectory.
#[derive(Clone, Copy, Debug)]
pub struct HamiltonianCheck {
    pub h: f64,
    /// Total derivative along the trajectory (centered finite difference).
    pub dh_dt: f64,
    /// Analytic explicit partial ∂H/∂t at fixed (W, P).
    pub partial_t_h: f64,
}

fn hamiltonian_at(
    obj: &Objective,
    x_star: &DVector<f64>,
    f_star: f64,
    t: f64,
    x: &DVector<f64>,
    v: &DVector<f64>,
) -> f64 {
    let p = conjugate_momentum(t, x, v, x_star);
    0.5 * t * p.norm_squared() + t.powi(3) * (obj.value(x) - f_star)
}

/// Evaluate H, dH/dt (finite difference along the flow), and the analytic
/// ∂H/∂t at an interior time of a canonical vanishing-damping trajectory.
///
/// ∂H/∂t = ½‖P‖² + 3t²(f − f★) + t³⟨∇f(X), ∂X/∂t|_W⟩ with
/// ∂X/∂t|_W = −2(X − X★)/t.
pub fn hamiltonian_check(
    obj: &Objective,
    traj: &Trajectory,
    x_star: &DVector<f64>,
    t: f64,
    fd_step: Option<f64>,
) -> Result<HamiltonianCheck> {
    if !matches!(traj.family(), OdeFamily::VanishingDamping { r } if r == 3.0) {
        return Err(Error::Configuration(format!(
            "Hamiltonian identity applies to the vanishing-damping r=3 flow, got {}",
            traj.family().id()
        )));
    }
    let f_star = obj
        .f_star()
        .ok_or_else(|| Error::Metadata("Hamiltonian needs f_star metadata".into()))?;
    let (lo, hi) = (traj.start_time(), traj.end_time());
    if !(t > lo && t < hi) {
        return Err(Error::Range {
            what: "Hamiltonian evaluation time".into(),
            value: t,
            lo,
            hi,
        });
    }

    let step = fd_step.unwrap_or(1e-4 * t.abs().max(1.0));
    let step = step.min((t - lo) * 0.5).min((hi - t) * 0.5);
    if step < 1e-12 * t.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step underflow at t = {t}"
        )));
    }

    let (x, v) = traj.dense_eval(t)?;
    let h = hamiltonian_at(obj, x_star, f_star, t, &x, &v);

    let (xp, vp) = traj.dense_eval(t + step)?;
    let (xm, vm) = traj.dense_eval(t - step)?;
    let dh_dt = (hamiltonian_at(obj, x_star, f_star, t + step, &xp, &vp)
        - hamiltonian_at(obj, x_star, f_star, t - step, &xm, &vm))
        / (2.0 * step);

    let p = conjugate_momentum(t, &x, &v, x_star);
    let dx = &x - x_star;
    let partial_t_h = 0.5 * p.norm_squared() + 3.0 * t * t * (obj.value(&x) - f_star)
        - 2.0 * t * t * obj.gradient(&x).dot(&dx);

    Ok(HamiltonianCheck {
        h,
        dh_dt,
        partial_t_h,
    })
}
