//! Closed-form convergence-rate bounds implied by the conservation laws.

use crate::error::{Error, Result};

/// One parameterized evaluator for every closed-form bound in the catalog.
/// `value(t)` returns the bound at time (or horizon) t; the measured
/// quantity is f(X(t)) − f★ except for the terminal-gradient bounds, which
/// cap ‖∇f(X(T))‖².
#[derive(Clone, Copy, Debug)]
pub enum RateBound {
    /// f − f★ ≤ 2‖X₀−X★‖²/t²  (canonical vanishing damping)
    AgmR3 { dist0_sq: f64 },
    /// f − f★ ≤ (r−1)‖X₀−X★‖²/t²  (r > 3)
    AgmRGt3 { r: f64, dist0_sq: f64 },
    /// f − f★ ≤ E/t^{2r/3}  (0 ≤ r < 3; E measured at the law's t0)
    AgmRLt3 { r: f64, energy: f64 },
    /// f − f★ ≤ E/t^{2γr/(γ+2)}  (growth hypothesis, r ≤ 1 + 2/γ)
    Growth { r: f64, gamma: f64, energy: f64 },
    /// f − f★ ≤ e^{−√μ t}(f(X₀)−f★ + (μ/2)‖X₀−X★‖²)
    ScAgm { mu: f64, f_gap0: f64, dist0_sq: f64 },
    /// f − f★ ≤ ‖X₀−X★‖²/(2t)
    GradientFlow { dist0_sq: f64 },
    /// ‖∇f(X(T))‖² ≤ 2(−1−r)·f_drop/T², f_drop = f(X₀) − f(X(T))
    /// (r = −3 gives the canonical 4·f_drop/T²)
    OgmgTerminal { r: f64, f_drop: f64 },
    /// ‖∇f(X(T))‖² ≤ 8‖X₀−X★‖²/T⁴ for the chained flow
    ConcatTerminal { dist0_sq: f64 },
}

impl RateBound {
    pub fn id(&self) -> &'static str {
        match self {
            RateBound::AgmR3 { .. } => "agm_r3",
            RateBound::AgmRGt3 { .. } => "agm_r_gt3",
            RateBound::AgmRLt3 { .. } => "agm_r_lt3",
            RateBound::Growth { .. } => "growth",
            RateBound::ScAgm { .. } => "scagm",
            RateBound::GradientFlow { .. } => "gradient_flow",
            RateBound::OgmgTerminal { .. } => "ogmg_terminal",
            RateBound::ConcatTerminal { .. } => "concat_terminal",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            RateBound::AgmR3 { dist0_sq } if dist0_sq < 0.0 => {
                bad("initial distance must be nonnegative".into())
            }
            RateBound::AgmRGt3 { r, .. } if r <= 3.0 => {
                bad(format!("this bound needs r > 3, got {r}"))
            }
            RateBound::AgmRLt3 { r, .. } if !(0.0..3.0).contains(&r) => {
                bad(format!("this bound needs 0 <= r < 3, got {r}"))
            }
            RateBound::Growth { r, gamma, .. } if gamma < 1.0 => bad(format!(
                "growth bound needs gamma >= 1, got {gamma} (r = {r})"
            )),
            RateBound::Growth { r, gamma, .. } if r > 1.0 + 2.0 / gamma + 1e-12 => bad(format!(
                "growth bound needs r <= 1 + 2/gamma = {}, got {r}",
                1.0 + 2.0 / gamma
            )),
            RateBound::ScAgm { mu, .. } if !(mu > 0.0) => {
                bad(format!("strongly convex bound needs mu > 0, got {mu}"))
            }
            RateBound::OgmgTerminal { r, .. } if r > -3.0 => {
                bad(format!("terminal-gradient bound needs r <= -3, got {r}"))
            }
            _ => Ok(()),
        }
    }

    /// Bound value at time (or horizon) `t`.
    pub fn value(&self, t: f64) -> Result<f64> {
        self.validate()?;
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bounds are evaluated at positive times, got {t}"
            )));
        }
        Ok(match *self {
            RateBound::AgmR3 { dist0_sq } => 2.0 * dist0_sq / (t * t),
            RateBound::AgmRGt3 { r, dist0_sq } => (r - 1.0) * dist0_sq / (t * t),
            RateBound::AgmRLt3 { r, energy } => energy / t.powf(2.0 * r / 3.0),
            RateBound::Growth { r, gamma, energy } => {
                energy / t.powf(2.0 * gamma * r / (gamma + 2.0))
            }
            RateBound::ScAgm {
                mu,
                f_gap0,
                dist0_sq,
            } => (-mu.sqrt() * t).exp() * (f_gap0 + 0.5 * mu * dist0_sq),
            RateBound::GradientFlow { dist0_sq } => dist0_sq / (2.0 * t),
            RateBound::OgmgTerminal { r, f_drop } => 2.0 * (-1.0 - r) * f_drop / (t * t),
            RateBound::ConcatTerminal { dist0_sq } => 8.0 * dist0_sq / t.powi(4),
        })
    }
}
