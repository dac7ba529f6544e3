//! Concatenation of the function-value phase with the gradient-norm phase:
//! only the point crosses the seam, never the momentum.

use nalgebra::DVector;

use super::ogmg::run_ogmg;
use super::ssse::run_ssse;
use super::RunRecord;
use crate::dynamics::{
    integrate, terminal_analysis, IntegratorConfig, OdeFamily, TerminalReport, Trajectory,
};
use crate::error::{Error, Result};
use crate::problems::ProblemInstance;

/// Discrete chain: the first half runs the symplectic scheme with stepsize
/// `s_first`, the second half restarts the gradient-norm scheme from the
/// first half's gradient-step output with a fresh z.
pub fn run_concat(
    problem: &ProblemInstance,
    total_budget: usize,
    s_first: f64,
) -> Result<(RunRecord, RunRecord)> {
    if total_budget < 4 || !total_budget.is_multiple_of(2) {
        return Err(Error::DegenerateRun(format!(
            "chained run needs an even budget of at least 4, got {total_budget}"
        )));
    }
    let half = total_budget / 2;
    let first = run_ssse(problem, s_first, half)?;
    let handoff = first.state(half).x_plus.clone();
    let second_problem = ProblemInstance::new(
        problem.objective.clone(),
        handoff,
        format!("{}+grad_phase", problem.label),
    )?;
    let second = run_ogmg(&second_problem, half)?;
    Ok((first, second))
}

/// Continuous chain: the vanishing-damping flow over [0, T], then the
/// terminal-damping flow over another [0, T] started at X_F(T) with zero
/// velocity.
pub struct OdeConcatReport {
    pub first: Trajectory,
    pub handoff: DVector<f64>,
    pub terminal: TerminalReport,
}

pub fn concat_ode(
    problem: &ProblemInstance,
    horizon: f64,
    config: &IntegratorConfig,
    deltas: &[f64],
) -> Result<OdeConcatReport> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let eps = config.start_offset * horizon;
    let first = integrate(
        OdeFamily::VanishingDamping { r: 3.0 },
        problem,
        eps,
        horizon,
        config,
        Vec::new(),
    )?;
    let (handoff, _) = first.dense_eval(horizon)?;
    let second_problem = ProblemInstance::new(
        problem.objective.clone(),
        handoff.clone(),
        format!("{}+grad_phase", problem.label),
    )?;
    let terminal = terminal_analysis(
        OdeFamily::TerminalDamping { r: -3.0, horizon },
        &second_problem,
        config,
        deltas,
    )?;
    Ok(OdeConcatReport {
        first,
        handoff,
        terminal,
    })
}
