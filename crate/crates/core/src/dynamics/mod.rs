//! ODE families of damped gradient dynamics, a reference integrator with
//! dense output, co-integrated accumulator channels, and terminal-time
//! analysis for the anti-vanishing damping family.

mod dopri5;
mod terminal;
mod trajectory;

pub use terminal::{terminal_analysis, TerminalReport};
pub use trajectory::{State, Trajectory};

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::problems::{Objective, ProblemInstance};

/// Second-order damped flows plus first-order gradient flow.
///
/// * `VanishingDamping(r)`: Ẍ + (r/t)Ẋ + ∇f(X) = 0
/// * `ConstantDamping(μ)`: Ẍ + 2√μ Ẋ + ∇f(X) = 0
/// * `TerminalDamping(r, T)`: Ẍ + (r/(t−T))Ẋ + 2∇f(X) = 0, r < 0
/// * `GradientFlow`: Ẋ + ∇f(X) = 0
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OdeFamily {
    VanishingDamping { r: f64 },
    ConstantDamping { mu: f64 },
    TerminalDamping { r: f64, horizon: f64 },
    GradientFlow,
}

impl OdeFamily {
    /// Multiplier on ∇f in the second-order equation (2 for the terminal
    /// damping family, 1 elsewhere).
    pub fn gradient_scale(&self) -> f64 {
        match self {
            OdeFamily::TerminalDamping { .. } => 2.0,
            _ => 1.0,
        }
    }

    /// Damping coefficient in front of Ẋ at time `t`.
    pub fn damping(&self, t: f64) -> f64 {
        match self {
            OdeFamily::VanishingDamping { r } => r / t,
            OdeFamily::ConstantDamping { mu } => 2.0 * mu.sqrt(),
            OdeFamily::TerminalDamping { r, horizon } => r / (t - horizon),
            OdeFamily::GradientFlow => 0.0,
        }
    }

    pub fn is_second_order(&self) -> bool {
        !matches!(self, OdeFamily::GradientFlow)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OdeFamily::ConstantDamping { mu } if !(*mu > 0.0) => Err(Error::InvalidParameter(
                format!("constant damping needs mu > 0, got {mu}"),
            )),
            OdeFamily::TerminalDamping { r, horizon } => {
                if !(*r < 0.0) {
                    Err(Error::InvalidParameter(format!(
                        "terminal damping needs r < 0, got {r}"
                    )))
                } else if !(*horizon > 0.0) {
                    Err(Error::InvalidParameter(format!(
                        "terminal damping needs horizon > 0, got {horizon}"
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn id(&self) -> String {
        match self {
            OdeFamily::VanishingDamping { r } => format!("vanishing(r={r})"),
            OdeFamily::ConstantDamping { mu } => format!("constant(mu={mu})"),
            OdeFamily::TerminalDamping { r, horizon } => format!("terminal(r={r},T={horizon})"),
            OdeFamily::GradientFlow => "gradient_flow".into(),
        }
    }
}

/// Tolerances and sampling controls for the reference integrator.
#[derive(Clone, Copy, Debug)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Start offset ε for the damping singular at t = 0.
    pub start_offset: f64,
    /// Terminal offset δ for the damping singular at t = T, as a fraction of T.
    pub terminal_offset: f64,
    /// Number of dense-output samples (inclusive of both ends).
    pub sample_count: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        // conservation-drift acceptance at 1e-6 needs two orders of headroom
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            start_offset: 1e-6,
            terminal_offset: 1e-4,
            sample_count: 2000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0) {
            return Err(Error::InvalidParameter(
                "integrator tolerances and max_step must be positive".into(),
            ));
        }
        if self.sample_count < 2 {
            return Err(Error::InvalidParameter(
                "sample_count must be at least 2".into(),
            ));
        }
        Ok(())
    }

    /// Geometric offset ladder for terminal extrapolation, ending at
    /// `terminal_offset`·horizon.
    pub fn terminal_ladder(&self, horizon: f64) -> [f64; 3] {
        let floor = self.terminal_offset * horizon;
        [100.0 * floor, 10.0 * floor, floor]
    }
}

/// Integrand of an accumulator channel, as a function of (t, X, Ẋ).
pub type Integrand = Arc<dyn Fn(f64, &DVector<f64>, &DVector<f64>) -> f64 + Send + Sync>;

/// A named integral channel co-integrated with the flow. The integrand is a
/// function of (t, X, Ẋ); the channel value starts at 0 at the first sample.
#[derive(Clone)]
pub struct AccumulatorSpec {
    pub name: String,
    pub integrand: Integrand,
}

impl AccumulatorSpec {
    pub fn new(
        name: impl Into<String>,
        integrand: impl Fn(f64, &DVector<f64>, &DVector<f64>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        AccumulatorSpec {
            name: name.into(),
            integrand: Arc::new(integrand),
        }
    }
}

/// Series seed for the damping singular at t = 0: returns (X(ε), Ẋ(ε)) from
/// the local expansion around the initial condition X(0) = X₀, Ẋ(0) = 0.
///
/// For vanishing damping the solution is even in t, so the truncation error
/// is O(ε⁴); for constant and terminal damping the cubic term is included to
/// reach the same order.
pub fn taylor_init(
    family: OdeFamily,
    obj: &Objective,
    x0: &DVector<f64>,
    eps: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    family.validate()?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "expansion offset must be positive, got {eps}"
        )));
    }
    let g0 = obj.gradient(x0);
    match family {
        OdeFamily::VanishingDamping { r } => {
            if r <= -1.0 {
                return Err(Error::InvalidParameter(format!(
                    "series seed needs r > -1 (denominator 1+r), got r = {r}"
                )));
            }
            // substitute X₀ + c t² into the equation: 2c(1+r) = −∇f(X₀)
            let c = -1.0 / (2.0 * (1.0 + r));
            let x = x0 + &g0 * (c * eps * eps);
            let v = &g0 * (2.0 * c * eps);
            Ok((x, v))
        }
        OdeFamily::ConstantDamping { mu } => {
            // Ẍ(0) = −∇f(X₀), X⁽³⁾(0) = 2√μ ∇f(X₀)
            let rmu = mu.sqrt();
            let x = x0 + &g0 * (-0.5 * eps * eps + rmu * eps.powi(3) / 3.0);
            let v = &g0 * (-eps + rmu * eps * eps);
            Ok((x, v))
        }
        OdeFamily::TerminalDamping { r, horizon } => {
            // Ẍ(0) = −2∇f(X₀), X⁽³⁾(0) = (r/T)·Ẍ(0)
            let x = x0 + &g0 * (-eps * eps - r * eps.powi(3) / (3.0 * horizon));
            let v = &g0 * (-2.0 * eps - r * eps * eps / horizon);
            Ok((x, v))
        }
        OdeFamily::GradientFlow => Err(Error::InvalidParameter(
            "gradient flow has no singular start; integrate from t = 0 directly".into(),
        )),
    }
}

/// Integrate `family` on `[t_start, t_end]` from the canonical initial
/// condition X = X₀, Ẋ = 0 (series-seeded at t_start when t_start > 0),
/// co-integrating the requested accumulator channels as augmented state.
pub fn integrate(
    family: OdeFamily,
    problem: &ProblemInstance,
    t_start: f64,
    t_end: f64,
    config: &IntegratorConfig,
    accumulator_specs: Vec<AccumulatorSpec>,
) -> Result<Trajectory> {
    family.validate()?;
    config.validate()?;
    if !(t_start < t_end) {
        return Err(Error::InvalidParameter(format!(
            "need t_start < t_end, got [{t_start}, {t_end}]"
        )));
    }
    if let OdeFamily::VanishingDamping { .. } = family {
        if !(t_start > 0.0) {
            return Err(Error::InvalidParameter(
                "vanishing damping is singular at t = 0; start at the series seed ε > 0".into(),
            ));
        }
    }
    if let OdeFamily::TerminalDamping { horizon, .. } = family {
        if t_end >= horizon {
            return Err(Error::Range {
                what: "t_end for terminal damping".into(),
                value: t_end,
                lo: t_start,
                hi: horizon,
            });
        }
    }

    let obj = &problem.objective;
    let n = obj.dim();
    let m = accumulator_specs.len();
    let second_order = family.is_second_order();
    let state_len = if second_order { 2 * n + m } else { n + m };

    // initial state
    let (x_init, v_init) = if t_start > 0.0 && second_order {
        taylor_init(family, obj, &problem.x0, t_start)?
    } else {
        (problem.x0.clone(), DVector::zeros(n))
    };

    let mut y0 = DVector::zeros(state_len);
    y0.rows_mut(0, n).copy_from(&x_init);
    if second_order {
        y0.rows_mut(n, n).copy_from(&v_init);
    }

    let specs_for_rhs = accumulator_specs.clone();
    let fam = family;
    let valid_radius = obj.valid_radius();
    let grad = {
        let o = obj.clone();
        move |x: &DVector<f64>| o.gradient(x)
    };
    let gscale = family.gradient_scale();

    let rhs = move |t: f64, y: &DVector<f64>| -> DVector<f64> {
        let x = DVector::from(y.rows(0, n));
        // locally smooth objectives declare the radius their L is valid on;
        // leaving it voids the oracle contract, so the run must abort
        if let Some(radius) = valid_radius {
            if x.norm() > radius {
                return DVector::from_element(y.len(), f64::NAN);
            }
        }
        let g = grad(&x);
        let mut dy = DVector::zeros(state_len);
        if second_order {
            let v = DVector::from(y.rows(n, n));
            let damping = fam.damping(t);
            // Ẋ = V, V̇ = −damping·V − gscale·∇f(X)
            dy.rows_mut(0, n).copy_from(&v);
            for i in 0..n {
                dy[n + i] = -damping * v[i] - gscale * g[i];
            }
            for (j, spec) in specs_for_rhs.iter().enumerate() {
                dy[2 * n + j] = (spec.integrand)(t, &x, &v);
            }
        } else {
            let v = -&g;
            dy.rows_mut(0, n).copy_from(&v);
            for (j, spec) in specs_for_rhs.iter().enumerate() {
                dy[n + j] = (spec.integrand)(t, &x, &v);
            }
        }
        dy
    };

    let samples: Vec<f64> = (0..config.sample_count)
        .map(|i| {
            let s = i as f64 / (config.sample_count - 1) as f64;
            t_start + s * (t_end - t_start)
        })
        .collect();

    let opts = dopri5::StepperOptions {
        rel_tol: config.rel_tol,
        abs_tol: config.abs_tol,
        max_step: config.max_step,
    };
    let sol = dopri5::integrate_sampled(&rhs, y0, &samples, &opts)?;

    Ok(Trajectory::from_flat_solution(
        family,
        problem.label.clone(),
        sol,
        n,
        accumulator_specs,
    ))
}
