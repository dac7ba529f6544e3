//! Gradient-norm method in z-sequence form, with the backward weight
//! schedule. At iteration k the weight with K−k iterations remaining is
//! schedule value θ̃_k, which approaches (K−k)/2 for large budgets.

use super::theta::ThetaSchedule;
use super::{finite_gradient, DiscreteState, RunRecord};
use crate::error::{Error, Result};
use crate::problems::{Objective, ProblemInstance};

/// Run with the canonical stepsize 1/L.
pub fn run_ogmg(problem: &ProblemInstance, budget: usize) -> Result<RunRecord> {
    run_ogmg_with_step(problem, budget, 1.0 / problem.objective.lipschitz())
}

/// Run with the backward schedule and an explicit stepsize.
pub fn run_ogmg_with_step(problem: &ProblemInstance, budget: usize, s: f64) -> Result<RunRecord> {
    let theta = ThetaSchedule::ogmg(budget)?;
    run_ogmg_with_schedule(problem, budget, s, &theta)
}

/// Run the scheme
///   x_k⁺ = x_k − s∇f(x_k)
///   z_{k+1} = z_k − sθ̃_k∇f(x_k)
///   x_{k+1} = (θ̃_{k+2}⁴/θ̃_{k+1}⁴)x_k⁺ + (1 − θ̃_{k+2}⁴/θ̃_{k+1}⁴)z_{k+1}
/// from x₀ = z₀ = X₀, with a caller-supplied weight schedule so that
/// alternatives to the backward recursion can be tested. The weight θ̃_{K+1}
/// needed by the final x-update does not exist, so the last step is the pure
/// momentum step x_K = z_K, flagged on the record.
pub fn run_ogmg_with_schedule(
    problem: &ProblemInstance,
    budget: usize,
    s: f64,
    theta: &ThetaSchedule,
) -> Result<RunRecord> {
    if budget < 2 {
        return Err(Error::DegenerateRun(
            "gradient-norm scheme needs a budget of at least 2".into(),
        ));
    }
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "stepsize must be positive, got {s}"
        )));
    }
    if theta.values().len() != budget + 1 {
        return Err(Error::InvalidParameter(format!(
            "schedule has {} values, budget {budget} needs {}",
            theta.values().len(),
            budget + 1
        )));
    }
    let obj = &problem.objective;
    let mut iterates = Vec::with_capacity(budget + 1);
    let mut x = problem.x0.clone();
    let mut z = problem.x0.clone();

    for k in 0..budget {
        let g = obj.gradient(&x);
        finite_gradient(&g, k)?;
        let x_plus = &x - &g * s;
        iterates.push(DiscreteState {
            x: x.clone(),
            x_plus: x_plus.clone(),
            z: z.clone(),
            theta: theta.get(k),
        });
        z -= &g * (s * theta.get(k));
        if k + 2 <= budget {
            let ratio = (theta.get(k + 2) / theta.get(k + 1)).powi(4);
            x = &x_plus * ratio + &z * (1.0 - ratio);
        } else {
            x = z.clone();
        }
    }
    let g = obj.gradient(&x);
    finite_gradient(&g, budget)?;
    iterates.push(DiscreteState {
        x: x.clone(),
        x_plus: &x - &g * s,
        z,
        theta: theta.get(budget),
    });

    Ok(RunRecord {
        method: "ogmg",
        stepsize: s,
        plus_step: s,
        iterates,
        problem_label: problem.label.clone(),
        budget,
        final_step_clamped: true,
    })
}

/// U_k for 1 ≤ k ≤ K:
///   U_k = (1/θ̃_k²)( (s/2)‖∇f(x_K)‖² + (s/2)‖∇f(x_k)‖²
///         + f(x_k) − f(x_K) − ⟨∇f(x_k), x_k − x_{k−1}⁺⟩ )
///       + (1/(sθ̃_k⁴))⟨z_k − x_{k−1}⁺, z_k − x_K⁺⟩,
/// nonincreasing along the run; its terminal value is s‖∇f(x_K)‖².
pub fn ogmg_lyapunov(obj: &Objective, record: &RunRecord, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Index(
            "U_0 is undefined: there is no x_{-1} gradient-step point".into(),
        ));
    }
    if k > record.budget {
        return Err(Error::Index(format!(
            "k = {k} exceeds budget {}",
            record.budget
        )));
    }
    let s = record.stepsize;
    let st = record.state(k);
    let theta = st.theta;
    let g_k = record.gradient(k);
    let g_last = record.gradient(record.budget);
    let x_prev_plus = &record.state(k - 1).x_plus;
    let x_last = &record.state(record.budget).x;
    let x_last_plus = &record.state(record.budget).x_plus;

    let inner2 = theta * theta;
    let inner4 = inner2 * inner2;
    let value_part =
        0.5 * s * g_last.norm_squared() + 0.5 * s * g_k.norm_squared() + obj.value(&st.x)
            - obj.value(x_last)
            - g_k.dot(&(&st.x - x_prev_plus));
    let cross_part = (&st.z - x_prev_plus).dot(&(&st.z - x_last_plus));
    Ok(value_part / inner2 + cross_part / (s * inner4))
}

/// U_k for k = 1..=budget.
pub fn ogmg_lyapunov_series(obj: &Objective, record: &RunRecord) -> Result<Vec<(f64, f64)>> {
    (1..=record.budget)
        .map(|k| Ok((k as f64, ogmg_lyapunov(obj, record, k)?)))
        .collect()
}
