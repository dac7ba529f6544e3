//! Lyapunov functions: the non-integral parts of the conservation laws,
//! monotonically nonincreasing along their flows.

use nalgebra::DVector;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::problems::Objective;

/// Φ(t) = t²(f(X) − f★) + ½‖tẊ + 2(X − X★)‖² for the canonical
/// vanishing-damping flow. `f_gap` = f(X) − f★ is supplied by the caller.
pub fn lyapunov_agm(
    t: f64,
    x: &DVector<f64>,
    v: &DVector<f64>,
    x_star: &DVector<f64>,
    f_gap: f64,
) -> f64 {
    t * t * f_gap + 0.5 * (v * t + (x - x_star) * 2.0).norm_squared()
}

/// Φ(t) for the terminal-damping flow with r ≤ −3:
/// 2(T−t)^{−2}·f_gap + ½(T−t)^{−4}‖(T−t)Ẋ + 2(X−X_T)‖²
/// + (r+1)(T−t)^{−4}‖X−X_T‖², where f_gap = f(X) − f(X(T)).
#[allow(clippy::too_many_arguments)]
pub fn lyapunov_ogmg(
    t: f64,
    x: &DVector<f64>,
    v: &DVector<f64>,
    x_terminal: &DVector<f64>,
    f_gap: f64,
    horizon: f64,
    r: f64,
) -> Result<f64> {
    if !(t < horizon) || t < 0.0 {
        return Err(Error::Range {
            what: "lyapunov evaluation time".into(),
            value: t,
            lo: 0.0,
            hi: horizon,
        });
    }
    if r > -3.0 {
        return Err(Error::InvalidParameter(format!(
            "terminal Lyapunov function needs r <= -3, got {r}"
        )));
    }
    let tau = horizon - t;
    let dx = x - x_terminal;
    let inv2 = 1.0 / (tau * tau);
    let inv4 = inv2 * inv2;
    Ok(2.0 * inv2 * f_gap
        + 0.5 * inv4 * (v * tau + &dx * 2.0).norm_squared()
        + (r + 1.0) * inv4 * dx.norm_squared())
}

/// Φ series along a vanishing-damping trajectory at the given times.
pub fn lyapunov_agm_series(
    obj: &Objective,
    traj: &Trajectory,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let xs = obj
        .minimizer()
        .ok_or_else(|| Error::Metadata("Lyapunov series needs minimizer metadata".into()))?
        .clone();
    let fs = obj
        .f_star()
        .ok_or_else(|| Error::Metadata("Lyapunov series needs f_star metadata".into()))?;
    times
        .iter()
        .map(|&t| {
            let (x, v) = traj.dense_eval(t)?;
            Ok((t, lyapunov_agm(t, &x, &v, &xs, obj.value(&x) - fs)))
        })
        .collect()
}

/// Φ series along a terminal-damping trajectory, centered at the
/// extrapolated terminal state.
pub fn lyapunov_ogmg_series(
    obj: &Objective,
    traj: &Trajectory,
    x_terminal: &DVector<f64>,
    f_terminal: f64,
    horizon: f64,
    r: f64,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    times
        .iter()
        .map(|&t| {
            let (x, v) = traj.dense_eval(t)?;
            let phi = lyapunov_ogmg(
                t,
                &x,
                &v,
                x_terminal,
                obj.value(&x) - f_terminal,
                horizon,
                r,
            )?;
            Ok((t, phi))
        })
        .collect()
}
