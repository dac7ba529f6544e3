//! Classical momentum baseline with the standard extrapolation sequence
//! t_{k+1} = (1 + √(1 + 4t_k²))/2, used for comparison against the
//! symplectic scheme.

use super::{finite_gradient, DiscreteState, RunRecord};
use crate::error::{Error, Result};
use crate::problems::ProblemInstance;

/// Standard accelerated gradient iteration with stepsize 1/L. The record
/// stores the x-sequence; z holds the extrapolation point y_k and θ the
/// t_k weight.
pub fn run_nesterov_agm(problem: &ProblemInstance, budget: usize) -> Result<RunRecord> {
    if budget == 0 {
        return Err(Error::DegenerateRun(
            "empty run: budget must be >= 1".into(),
        ));
    }
    let obj = &problem.objective;
    let s = 1.0 / obj.lipschitz();
    let mut iterates = Vec::with_capacity(budget + 1);
    let mut x = problem.x0.clone();
    let mut y = problem.x0.clone();
    let mut t = 1.0_f64;

    for k in 0..budget {
        let gx = obj.gradient(&x);
        finite_gradient(&gx, k)?;
        iterates.push(DiscreteState {
            x: x.clone(),
            x_plus: &x - &gx * s,
            z: y.clone(),
            theta: t,
        });
        let gy = obj.gradient(&y);
        finite_gradient(&gy, k)?;
        let x_next = &y - &gy * s;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = &x_next + (&x_next - &x) * ((t - 1.0) / t_next);
        x = x_next;
        t = t_next;
    }
    let gx = obj.gradient(&x);
    finite_gradient(&gx, budget)?;
    iterates.push(DiscreteState {
        x: x.clone(),
        x_plus: &x - &gx * s,
        z: y,
        theta: t,
    });

    Ok(RunRecord {
        method: "nesterov_agm",
        stepsize: s,
        plus_step: s,
        iterates,
        problem_label: problem.label.clone(),
        budget,
        final_step_clamped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_quadratic;
    use nalgebra::DVector;

    #[test]
    fn minimizer_start_is_constant() {
        let obj = make_quadratic(&[1.0], &[0.0], 0.0).unwrap();
        let p = ProblemInstance::new(obj, DVector::zeros(1), "q0").unwrap();
        let rec = run_nesterov_agm(&p, 6).unwrap();
        for st in &rec.iterates {
            assert_eq!(st.x[0], 0.0);
        }
    }

    /// Classical envelope f(x_K) − f★ ≤ 2L‖X₀−X★‖²/(K+1)² as a sanity check.
    #[test]
    fn classical_rate_envelope() {
        let obj = make_quadratic(&[1.0, 4.0], &[0.0, 0.0], 0.0).unwrap();
        let p = ProblemInstance::new(obj.clone(), DVector::from_column_slice(&[1.0, 1.0]), "q2")
            .unwrap();
        for budget in [5usize, 10, 40] {
            let rec = run_nesterov_agm(&p, budget).unwrap();
            let gap = obj.value(&rec.state(budget).x);
            let bound = 2.0 * obj.lipschitz() * 2.0 / ((budget + 1) as f64).powi(2);
            assert!(gap <= bound, "K={budget}: {gap} > {bound}");
        }
    }
}
