//! Terminal-time analysis of the anti-vanishing damping flow.
//!
//! The damping coefficient r/(t−T) blows up at t = T but the solution
//! extends continuously with Ẋ(T) = 0 and Ẋ(t)/(t−T) → −2/(1+r)·∇f(X(T)),
//! so X(T) and the gradient limit are recovered by Richardson extrapolation
//! over a ladder of offsets δ.

use nalgebra::DVector;

use super::{integrate, IntegratorConfig, OdeFamily, Trajectory};
use crate::error::{Error, Result};
use crate::problems::ProblemInstance;

/// Result of extrapolating a terminal-damping trajectory to t = T.
pub struct TerminalReport {
    /// Continuous extension X(T).
    pub x_terminal: DVector<f64>,
    /// Extrapolated limit of Ẋ(t)/(t−T), which equals −2/(1+r)·∇f(X(T)).
    pub grad_limit: DVector<f64>,
    /// ∇f evaluated at the extrapolated X(T).
    pub grad_at_terminal: DVector<f64>,
    /// f evaluated at the extrapolated X(T).
    pub f_terminal: f64,
    /// (δ, ‖Ẋ(T−δ)‖) pairs down the ladder.
    pub speed_decay: Vec<(f64, f64)>,
    /// Observed order of ‖X(T−δ) − X(T)‖ in δ (≈ 2 in exact arithmetic).
    pub extrapolation_order: f64,
    /// Relative residual of grad_limit against −2/(1+r)·∇f(X(T)).
    pub limit_relation_error: f64,
    /// The underlying trajectory on [0, T − min δ], reusable for energy and
    /// Lyapunov evaluation.
    pub trajectory: Trajectory,
}

/// Integrate the terminal-damping flow up to T − min(deltas) and extrapolate
/// the terminal state. `deltas` must be strictly decreasing fractions of the
/// horizon in (0, T).
pub fn terminal_analysis(
    family: OdeFamily,
    problem: &ProblemInstance,
    config: &IntegratorConfig,
    deltas: &[f64],
) -> Result<TerminalReport> {
    let (r, horizon) = match family {
        OdeFamily::TerminalDamping { r, horizon } => (r, horizon),
        _ => {
            return Err(Error::InvalidParameter(
                "terminal analysis applies to the terminal damping family only".into(),
            ))
        }
    };
    if r == -1.0 {
        return Err(Error::InvalidParameter(
            "terminal limits are undefined at r = -1".into(),
        ));
    }
    if deltas.len() < 2 || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "need a strictly decreasing ladder of at least two offsets".into(),
        ));
    }
    if deltas[0] >= horizon || *deltas.last().unwrap() <= 0.0 {
        return Err(Error::InvalidParameter(
            "offsets must lie strictly inside (0, T)".into(),
        ));
    }

    let delta_min = *deltas.last().unwrap();
    let traj = integrate(
        family,
        problem,
        0.0,
        horizon - delta_min,
        config,
        Vec::new(),
    )?;

    let mut x_rungs = Vec::with_capacity(deltas.len());
    let mut slope_rungs = Vec::with_capacity(deltas.len());
    let mut speed_decay = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let (x, v) = traj.dense_eval(horizon - d)?;
        speed_decay.push((d, v.norm()));
        slope_rungs.push(&v / (-d)); // Ẋ(t)/(t−T) at t = T − δ
        x_rungs.push(x);
    }

    // the smooth branch deviates from X(T) by c₂δ² + O(δ⁴)
    let x_terminal = richardson(deltas, &x_rungs)?;
    let grad_limit = richardson(deltas, &slope_rungs)?;

    let extrapolation_order = observed_order(deltas, &x_rungs, &x_terminal);

    let grad_at_terminal = problem.objective.gradient(&x_terminal);
    let f_terminal = problem.objective.value(&x_terminal);
    let predicted = &grad_at_terminal * (-2.0 / (1.0 + r));
    let limit_relation_error = (&grad_limit - &predicted).norm() / predicted.norm().max(1e-12);

    Ok(TerminalReport {
        x_terminal,
        grad_limit,
        grad_at_terminal,
        f_terminal,
        speed_decay,
        extrapolation_order,
        limit_relation_error,
        trajectory: traj,
    })
}

/// Richardson extrapolation of A(δ) = A★ + c δ² + O(δ⁴) down the ladder,
/// with a convergence check on successive column entries.
fn richardson(deltas: &[f64], values: &[DVector<f64>]) -> Result<DVector<f64>> {
    let mut column: Vec<DVector<f64>> = values.to_vec();
    let mut steps: Vec<f64> = deltas.to_vec();
    let mut last_change = f64::INFINITY;
    while column.len() > 1 {
        let mut next = Vec::with_capacity(column.len() - 1);
        let mut next_steps = Vec::with_capacity(column.len() - 1);
        for i in 0..column.len() - 1 {
            let (d0, d1) = (steps[i], steps[i + 1]);
            let w = d0 * d0 / (d0 * d0 - d1 * d1);
            next.push(&column[i + 1] * w + &column[i] * (1.0 - w));
            next_steps.push(d1);
        }
        let change = (&next[next.len() - 1] - &column[column.len() - 1]).norm();
        if change > 10.0 * last_change && change > 1e-9 {
            return Err(Error::TerminalAnalysis(format!(
                "extrapolation diverging: successive estimates changed by {change}"
            )));
        }
        last_change = change;
        column = next;
        steps = next_steps;
    }
    Ok(column.pop().unwrap())
}

fn observed_order(deltas: &[f64], values: &[DVector<f64>], limit: &DVector<f64>) -> f64 {
    let errs: Vec<f64> = values.iter().map(|v| (v - limit).norm()).collect();
    let mut acc = 0.0;
    let mut count = 0;
    for i in 0..errs.len() - 1 {
        if errs[i] > 0.0 && errs[i + 1] > 0.0 {
            acc += (errs[i] / errs[i + 1]).ln() / (deltas[i] / deltas[i + 1]).ln();
            count += 1;
        }
    }
    if count == 0 {
        f64::NAN
    } else {
        acc / count as f64
    }
}
