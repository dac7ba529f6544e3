//! Discrete first-order methods in momentum (z-sequence) form, their
//! per-iteration Lyapunov certificates, and discrete↔continuous
//! correspondence checks.

mod concat;
mod nesterov;
mod oblg;
mod ogmg;
mod ssse;
mod theta;

pub use concat::{concat_ode, run_concat, OdeConcatReport};
pub use nesterov::run_nesterov_agm;
pub use oblg::{run_oblg, run_oblg_with_step};
pub use ogmg::{
    ogmg_lyapunov, ogmg_lyapunov_series, run_ogmg, run_ogmg_with_schedule, run_ogmg_with_step,
};
pub use ssse::{
    momentum_reconstruction_deviation, run_ssse, ssse_lyapunov, ssse_lyapunov_series,
    ssse_rate_margin, SsseRateMargin,
};
pub use theta::{ThetaSchedule, ThetaSource};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::problems::Objective;

/// One recorded iterate of a discrete run.
#[derive(Clone, Debug)]
pub struct DiscreteState {
    pub x: DVector<f64>,
    /// Gradient-step point x − plus_step·∇f(x), recomputable from x.
    pub x_plus: DVector<f64>,
    pub z: DVector<f64>,
    pub theta: f64,
}

/// Iterate history of one discrete-method run, indices 0..=budget.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub method: &'static str,
    /// Stepsize s of the method (1/L convention where applicable).
    pub stepsize: f64,
    /// Factor in x⁺ = x − plus_step·∇f(x): s/2 for the symplectic scheme,
    /// s for the gradient-norm methods.
    pub plus_step: f64,
    pub iterates: Vec<DiscreteState>,
    pub problem_label: String,
    pub budget: usize,
    /// Set when the last update had to fall back to x_K = z_K because the
    /// weight sequence runs out one step early.
    pub final_step_clamped: bool,
}

impl RunRecord {
    /// ∇f(x_k) recovered from the stored gradient-step point.
    pub fn gradient(&self, k: usize) -> DVector<f64> {
        let s = &self.iterates[k];
        (&s.x - &s.x_plus) / self.plus_step
    }

    pub fn state(&self, k: usize) -> &DiscreteState {
        &self.iterates[k]
    }
}

fn finite_gradient(g: &DVector<f64>, k: usize) -> Result<()> {
    if g.iter().any(|v| !v.is_finite()) {
        Err(Error::OracleFailure(k as f64))
    } else {
        Ok(())
    }
}

/// CSV serialization of a run:
/// `k, f_gap, grad_norm_sq, phi_or_u, bound, margin, x_0.., z_0..`.
/// Certificate and bound columns are filled from the closures where defined
/// and left empty elsewhere; f_gap is empty without f★ metadata.
pub fn run_record_csv(
    record: &RunRecord,
    obj: &Objective,
    phi_or_u: impl Fn(usize) -> Option<f64>,
    bound_and_margin: impl Fn(usize) -> Option<(f64, f64)>,
) -> String {
    use std::fmt::Write;
    let n = obj.dim();
    let mut out = String::from("k,f_gap,grad_norm_sq,phi_or_u,bound,margin");
    for i in 0..n {
        let _ = write!(out, ",x_{i}");
    }
    for i in 0..n {
        let _ = write!(out, ",z_{i}");
    }
    out.push('\n');
    for (k, st) in record.iterates.iter().enumerate() {
        let _ = write!(out, "{k}");
        match obj.f_star() {
            Some(fs) => {
                let _ = write!(out, ",{:.16e}", obj.value(&st.x) - fs);
            }
            None => out.push(','),
        }
        let _ = write!(out, ",{:.16e}", record.gradient(k).norm_squared());
        match phi_or_u(k) {
            Some(v) => {
                let _ = write!(out, ",{v:.16e}");
            }
            None => out.push(','),
        }
        match bound_and_margin(k) {
            Some((b, m)) => {
                let _ = write!(out, ",{b:.16e},{m:.16e}");
            }
            None => out.push_str(",,"),
        }
        for i in 0..n {
            let _ = write!(out, ",{:.16e}", st.x[i]);
        }
        for i in 0..n {
            let _ = write!(out, ",{:.16e}", st.z[i]);
        }
        out.push('\n');
    }
    out
}
