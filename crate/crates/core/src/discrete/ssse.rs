//! Semi-second-order symplectic Euler scheme in the dilated frame: an
//! alternating momentum/position update with a second-order position step,
//! run directly on (x, z) with θ_k = k/2.

use nalgebra::DVector;

use super::theta::ThetaSchedule;
use super::{finite_gradient, DiscreteState, RunRecord};
use crate::error::{Error, Result};
use crate::problems::{Objective, ProblemInstance};

/// Run the scheme
///   x_k⁺ = x_k − (s/2)∇f(x_k)
///   z_{k+1} = z_k − sθ_k∇f(x_k)
///   x_{k+1} = (θ_k²/θ_{k+1}²)x_k⁺ + (1 − θ_k²/θ_{k+1}²)z_{k+1}
/// from x₀ = z₀ = X₀. Stepsizes above 2/L are permitted (the certificates
/// will fail there, which is the point of exploring them).
pub fn run_ssse(problem: &ProblemInstance, s: f64, budget: usize) -> Result<RunRecord> {
    if budget == 0 {
        return Err(Error::DegenerateRun(
            "empty run: budget must be >= 1".into(),
        ));
    }
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "stepsize must be positive, got {s}"
        )));
    }
    let obj = &problem.objective;
    let theta = ThetaSchedule::ssse(budget);
    let mut iterates = Vec::with_capacity(budget + 1);
    let mut x = problem.x0.clone();
    let mut z = problem.x0.clone();

    for k in 0..budget {
        let g = obj.gradient(&x);
        finite_gradient(&g, k)?;
        let x_plus = &x - &g * (0.5 * s);
        let q = s * theta.get(k);
        let z_next = &z - &g * q;
        iterates.push(DiscreteState {
            x: x.clone(),
            x_plus: x_plus.clone(),
            z: z.clone(),
            theta: theta.get(k),
        });
        let ratio = {
            let (tk, tk1) = (theta.get(k), theta.get(k + 1));
            (tk * tk) / (tk1 * tk1)
        };
        x = &x_plus * ratio + &z_next * (1.0 - ratio);
        z = z_next;
    }
    let g = obj.gradient(&x);
    finite_gradient(&g, budget)?;
    iterates.push(DiscreteState {
        x: x.clone(),
        x_plus: &x - &g * (0.5 * s),
        z,
        theta: theta.get(budget),
    });

    Ok(RunRecord {
        method: "ssse",
        stepsize: s,
        plus_step: 0.5 * s,
        iterates,
        problem_label: problem.label.clone(),
        budget,
        final_step_clamped: false,
    })
}

fn optimum(obj: &Objective) -> Result<(DVector<f64>, f64)> {
    match (obj.minimizer(), obj.f_star()) {
        (Some(xs), Some(fs)) => Ok((xs.clone(), fs)),
        _ => Err(Error::Metadata(
            "certificate needs minimizer and f_star metadata".into(),
        )),
    }
}

/// Φ_k = 2c_kθ_k²(f(x_k) − f★ − (s/4)‖∇f(x_k)‖²) + (1/s)‖z_{k+1} − X★‖²
/// with c_k = θ_{k+1}/(θ_{k+1}² − θ_k²); nonincreasing for s ≤ 2/L.
pub fn ssse_lyapunov(obj: &Objective, record: &RunRecord, k: usize) -> Result<f64> {
    if k + 1 > record.budget {
        return Err(Error::Index(format!(
            "Lyapunov value needs z_{{k+1}}; k = {k} exceeds budget − 1 = {}",
            record.budget - 1
        )));
    }
    let (xs, fs) = optimum(obj)?;
    let s = record.stepsize;
    let st = record.state(k);
    let theta_k = st.theta;
    let theta_k1 = record.state(k + 1).theta;
    let c = theta_k1 / (theta_k1 * theta_k1 - theta_k * theta_k);
    let g = record.gradient(k);
    let z_next = &record.state(k + 1).z;
    Ok(
        2.0 * c * theta_k * theta_k * (obj.value(&st.x) - fs - 0.25 * s * g.norm_squared())
            + (z_next - &xs).norm_squared() / s,
    )
}

/// Φ_k for k = 0..budget−1.
pub fn ssse_lyapunov_series(obj: &Objective, record: &RunRecord) -> Result<Vec<(f64, f64)>> {
    (0..record.budget)
        .map(|k| Ok((k as f64, ssse_lyapunov(obj, record, k)?)))
        .collect()
}

/// Theorem-rate margins at iteration k ≥ 1: the plain bound
/// 2‖X₀−X★‖²/(sk²) and its sharpened form ((k+½)/(k+1))·plain, both against
/// the measured f(x_k⁺) − f★.
#[derive(Clone, Copy, Debug)]
pub struct SsseRateMargin {
    pub measured: f64,
    pub bound: f64,
    pub sharpened_bound: f64,
}

impl SsseRateMargin {
    pub fn margin(&self) -> f64 {
        self.bound - self.measured
    }

    pub fn sharpened_margin(&self) -> f64 {
        self.sharpened_bound - self.measured
    }
}

pub fn ssse_rate_margin(obj: &Objective, record: &RunRecord, k: usize) -> Result<SsseRateMargin> {
    if k == 0 || k > record.budget {
        return Err(Error::Index(format!(
            "rate bound is stated for 1 <= k <= budget, got {k}"
        )));
    }
    let (xs, fs) = optimum(obj)?;
    let d0 = (&record.state(0).x - &xs).norm_squared();
    let s = record.stepsize;
    let kf = k as f64;
    let bound = 2.0 * d0 / (s * kf * kf);
    Ok(SsseRateMargin {
        measured: obj.value(&record.state(k).x_plus) - fs,
        bound,
        sharpened_bound: (kf + 0.5) / (kf + 1.0) * bound,
    })
}

/// Maximum deviation between the recorded z-sequence and the one
/// reconstructed from the conjugate-momentum recurrence
/// p_{k+1} = p_k − 2sθ_k∇f(x_k), z_k = p_k/2 + X★.
/// Exactly zero (bitwise) when X★ = 0, since doubling and halving are exact.
pub fn momentum_reconstruction_deviation(
    obj: &Objective,
    record: &RunRecord,
    x_star: &DVector<f64>,
) -> f64 {
    let mut p = (&record.state(0).x - x_star) * 2.0;
    let mut worst = 0.0_f64;
    for k in 0..=record.budget {
        let rebuilt = &p / 2.0 + x_star;
        worst = worst.max((rebuilt - &record.state(k).z).amax());
        if k < record.budget {
            let g = obj.gradient(&record.state(k).x);
            let q = record.stepsize * record.state(k).theta;
            p -= g * (2.0 * q);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_quadratic;

    fn quad_problem(x0: f64) -> ProblemInstance {
        let obj = make_quadratic(&[1.0], &[0.0], 0.0).unwrap();
        ProblemInstance::new(obj, DVector::from_column_slice(&[x0]), "q1").unwrap()
    }

    #[test]
    fn fixed_point_at_minimizer() {
        let p = quad_problem(0.0);
        let rec = run_ssse(&p, 1.0, 5).unwrap();
        for st in &rec.iterates {
            assert_eq!(st.x[0], 0.0);
            assert_eq!(st.z[0], 0.0);
        }
    }

    /// Hand-evaluated recurrence: f = ½x², s = 2, X₀ = 1 converges exactly
    /// at k = 2.
    #[test]
    fn hand_run_exact_convergence() {
        let p = quad_problem(1.0);
        let rec = run_ssse(&p, 2.0, 3).unwrap();
        assert_eq!(rec.state(0).x_plus[0], 0.0);
        assert_eq!(rec.state(1).z[0], 1.0);
        assert_eq!(rec.state(1).x[0], 1.0);
        assert_eq!(rec.state(1).x_plus[0], 0.0);
        assert_eq!(rec.state(2).z[0], 0.0);
        assert_eq!(rec.state(2).x[0], 0.0);
        assert_eq!(rec.state(3).x[0], 0.0);
    }

    #[test]
    fn hand_run_lyapunov_values() {
        let p = quad_problem(1.0);
        let rec = run_ssse(&p, 2.0, 3).unwrap();
        let obj = &p.objective;
        // Φ_0 = (1/s)‖X₀ − X★‖² because θ_0 = 0 forces the value term out
        let phi0 = ssse_lyapunov(obj, &rec, 0).unwrap();
        assert_eq!(phi0, 0.5);
        let phi1 = ssse_lyapunov(obj, &rec, 1).unwrap();
        assert!(phi1.abs() < 1e-15);
    }

    #[test]
    fn hand_run_rate_margin() {
        let p = quad_problem(1.0);
        let rec = run_ssse(&p, 2.0, 3).unwrap();
        let m = ssse_rate_margin(&p.objective, &rec, 1).unwrap();
        assert_eq!(m.measured, 0.0);
        assert_eq!(m.bound, 1.0);
        assert_eq!(m.sharpened_bound, 0.75);
        assert_eq!(m.margin(), 1.0);
    }

    #[test]
    fn stationary_margins_trivial() {
        let p = quad_problem(0.0);
        let rec = run_ssse(&p, 1.0, 4).unwrap();
        let m = ssse_rate_margin(&p.objective, &rec, 2).unwrap();
        assert_eq!(m.measured, 0.0);
        assert_eq!(m.bound, 0.0);
    }

    #[test]
    fn empty_budget_rejected() {
        let p = quad_problem(1.0);
        assert!(matches!(run_ssse(&p, 1.0, 0), Err(Error::DegenerateRun(_))));
    }

    #[test]
    fn momentum_identity_bitwise_for_centered_problems() {
        let obj = make_quadratic(&[1.0, 4.0], &[0.0, 0.0], 0.0).unwrap();
        let p = ProblemInstance::new(obj, DVector::from_column_slice(&[1.0, -0.5]), "q2").unwrap();
        let rec = run_ssse(&p, 0.5, 200).unwrap();
        let dev = momentum_reconstruction_deviation(&p.objective, &rec, &DVector::zeros(2));
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn momentum_identity_ulp_scale_for_shifted_center() {
        let obj = make_quadratic(&[1.0, 4.0], &[3.0, -2.0], 1.0).unwrap();
        let x0 = DVector::from_column_slice(&[4.0, -1.0]);
        let xs = DVector::from_column_slice(&[3.0, -2.0]);
        let p = ProblemInstance::new(obj, x0, "q2-shifted").unwrap();
        let rec = run_ssse(&p, 0.25, 500).unwrap();
        let dev = momentum_reconstruction_deviation(&p.objective, &rec, &xs);
        assert!(dev <= 1e-12, "deviation {dev}");
    }

    #[test]
    fn metadata_required_for_certificates() {
        let obj = make_quadratic(&[1.0], &[0.0], 0.0)
            .unwrap()
            .without_optimum();
        let p = ProblemInstance::new(obj.clone(), DVector::from_column_slice(&[1.0]), "q").unwrap();
        let rec = run_ssse(&p, 1.0, 3).unwrap();
        assert!(matches!(
            ssse_lyapunov(&obj, &rec, 0),
            Err(Error::Metadata(_))
        ));
    }

    #[test]
    fn deterministic_reruns() {
        let p = quad_problem(1.0);
        let a = run_ssse(&p, 0.7, 50).unwrap();
        let b = run_ssse(&p, 0.7, 50).unwrap();
        for (sa, sb) in a.iterates.iter().zip(&b.iterates) {
            assert_eq!(sa.x[0].to_bits(), sb.x[0].to_bits());
            assert_eq!(sa.z[0].to_bits(), sb.z[0].to_bits());
        }
    }
}
