//! The gradient-norm variant whose continuous-time limit coincides with the
//! terminal-damping flow at r = −3: explicit (K−k)-dependent weights instead
//! of a recursive schedule.

use super::{finite_gradient, DiscreteState, RunRecord};
use crate::error::{Error, Result};
use crate::problems::ProblemInstance;

pub fn run_oblg(problem: &ProblemInstance, budget: usize) -> Result<RunRecord> {
    run_oblg_with_step(problem, budget, 1.0 / problem.objective.lipschitz())
}

/// Run the scheme
///   x_k⁺ = x_k − s∇f(x_k)
///   z_{k+1} = z_k − s((K−k+1)/2)∇f(x_k)
///   x_{k+1} = ((K−k−2)/(K−k+2))x_k⁺ + (4/(K−k+2))z_{k+1}
/// from x₀ = z₀ = X₀.
pub fn run_oblg_with_step(problem: &ProblemInstance, budget: usize, s: f64) -> Result<RunRecord> {
    if budget < 3 {
        return Err(Error::DegenerateRun(
            "weights degenerate below a budget of 3".into(),
        ));
    }
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "stepsize must be positive, got {s}"
        )));
    }
    let obj = &problem.objective;
    let kf = budget as f64;
    let mut iterates = Vec::with_capacity(budget + 1);
    let mut x = problem.x0.clone();
    let mut z = problem.x0.clone();

    for k in 0..budget {
        let g = obj.gradient(&x);
        finite_gradient(&g, k)?;
        let x_plus = &x - &g * s;
        let remaining = kf - k as f64;
        iterates.push(DiscreteState {
            x: x.clone(),
            x_plus: x_plus.clone(),
            z: z.clone(),
            theta: 0.5 * (remaining + 1.0),
        });
        z -= &g * (s * 0.5 * (remaining + 1.0));
        x = &x_plus * ((remaining - 2.0) / (remaining + 2.0)) + &z * (4.0 / (remaining + 2.0));
    }
    let g = obj.gradient(&x);
    finite_gradient(&g, budget)?;
    iterates.push(DiscreteState {
        x: x.clone(),
        x_plus: &x - &g * s,
        z,
        theta: 0.5,
    });

    Ok(RunRecord {
        method: "oblg",
        stepsize: s,
        plus_step: s,
        iterates,
        problem_label: problem.label.clone(),
        budget,
        final_step_clamped: false,
    })
}
