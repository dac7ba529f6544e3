//! The catalog of conservation laws along the damped gradient flows.
//!
//! Every law is an identity E ≡ boundary terms + accumulated integrals that
//! is constant along its matching trajectory. Integral terms whose center is
//! known before integration are co-integrated as accumulator channels;
//! terminal-centered laws are evaluated post hoc by composite Simpson over
//! dense output.

use nalgebra::DVector;

use crate::dynamics::{AccumulatorSpec, OdeFamily, Trajectory};
use crate::error::{Error, Result};
use crate::problems::{Objective, ProblemInstance};

/// Itemized evaluation of one conservation law at a single time.
#[derive(Clone, Debug)]
pub struct EnergyBreakdown {
    pub law_id: &'static str,
    pub t: f64,
    /// Named boundary terms, including constant offsets.
    pub boundary: Vec<(&'static str, f64)>,
    pub dissipation_integral: f64,
    pub convexity_integral: f64,
    /// Sum of every component, exactly as composed.
    pub total: f64,
    pub warning: Option<String>,
}

impl EnergyBreakdown {
    fn compose(
        law_id: &'static str,
        t: f64,
        boundary: Vec<(&'static str, f64)>,
        dissipation_integral: f64,
        convexity_integral: f64,
        warning: Option<String>,
    ) -> EnergyBreakdown {
        let total = boundary.iter().map(|(_, v)| v).sum::<f64>()
            + dissipation_integral
            + convexity_integral;
        EnergyBreakdown {
            law_id,
            t,
            boundary,
            dissipation_integral,
            convexity_integral,
            total,
            warning,
        }
    }
}

/// (t, total) pairs for certificate builders.
pub fn total_series(series: &[EnergyBreakdown]) -> Vec<(f64, f64)> {
    series.iter().map(|b| (b.t, b.total)).collect()
}

/// CSV serialization of an energy ledger:
/// `t, <boundary columns>, dissipation_integral, convexity_integral, total`.
pub fn energy_series_csv(series: &[EnergyBreakdown]) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    if series.is_empty() {
        return out;
    }
    out.push('t');
    for (name, _) in &series[0].boundary {
        let _ = write!(out, ",{name}");
    }
    out.push_str(",dissipation_integral,convexity_integral,total\n");
    for b in series {
        let _ = write!(out, "{:.16e}", b.t);
        for (_, v) in &b.boundary {
            let _ = write!(out, ",{v:.16e}");
        }
        let _ = writeln!(
            out,
            ",{:.16e},{:.16e},{:.16e}",
            b.dissipation_integral, b.convexity_integral, b.total
        );
    }
    out
}

fn optimum(obj: &Objective) -> Result<(DVector<f64>, f64)> {
    let xs = obj
        .minimizer()
        .cloned()
        .ok_or_else(|| Error::Metadata("law requires minimizer metadata".into()))?;
    let fs = obj
        .f_star()
        .ok_or_else(|| Error::Metadata("law requires f_star metadata".into()))?;
    Ok((xs, fs))
}

/// f★ − f(x) − ⟨∇f(x), X★ − x⟩ ≥ 0, the convexity-gap integrand shared by
/// every minimizer-centered law.
fn gap_at(obj: &Objective, x_star: &DVector<f64>, f_star: f64, x: &DVector<f64>) -> f64 {
    f_star - obj.value(x) - obj.gradient(x).dot(&(x_star - x))
}

fn channel_delta(traj: &Trajectory, name: &str, t0: Option<f64>, t: f64) -> Result<f64> {
    let v = traj.channel_eval(name, t)?;
    match t0 {
        None => Ok(v),
        Some(t0) => Ok(v - traj.channel_eval(name, t0)?),
    }
}

fn expect_family(traj: &Trajectory, want: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Configuration(format!(
            "law expects a {want} trajectory, got {}",
            traj.family().id()
        )))
    }
}

// ---------------------------------------------------------------------------
// Canonical vanishing-damping law (r = 3, α = 2, t0 → 0)
// ---------------------------------------------------------------------------

pub const AGM_R3_CONVEXITY: &str = "agm_r3_convexity";

pub fn agm_r3_channels(obj: &Objective) -> Result<Vec<AccumulatorSpec>> {
    let (xs, fs) = optimum(obj)?;
    let o = obj.clone();
    Ok(vec![AccumulatorSpec::new(
        AGM_R3_CONVEXITY,
        move |s: f64, x: &DVector<f64>, _v: &DVector<f64>| 2.0 * s * gap_at(&o, &xs, fs, x),
    )])
}

/// E = t²(f−f★) + ½‖tẊ + 2(X−X★)‖² + ∫ 2s·gap ds ≡ 2‖X₀−X★‖².
pub fn energy_agm_r3(obj: &Objective, traj: &Trajectory, t: f64) -> Result<EnergyBreakdown> {
    expect_family(
        traj,
        "vanishing-damping r=3",
        matches!(traj.family(), OdeFamily::VanishingDamping { r } if r == 3.0),
    )?;
    let (xs, fs) = optimum(obj)?;
    let (x, v) = traj.dense_eval(t)?;
    let dx = &x - &xs;
    let conv = channel_delta(traj, AGM_R3_CONVEXITY, None, t)?;
    Ok(EnergyBreakdown::compose(
        "agm_r3",
        t,
        vec![
            ("value_term", t * t * (obj.value(&x) - fs)),
            ("momentum_term", 0.5 * (&v * t + &dx * 2.0).norm_squared()),
        ],
        0.0,
        conv,
        None,
    ))
}

/// Closed-form t0 → 0 limit of the canonical law: 2‖X₀ − X★‖².
pub fn agm_r3_reference(problem: &ProblemInstance) -> Result<f64> {
    problem
        .initial_distance_sq()
        .map(|d| 2.0 * d)
        .ok_or_else(|| Error::Metadata("reference needs minimizer metadata".into()))
}

// ---------------------------------------------------------------------------
// General (r, α) vanishing-damping law
// ---------------------------------------------------------------------------

pub const AGM_GENERAL_DISSIPATION: &str = "agm_general_dissipation";
pub const AGM_GENERAL_CONVEXITY: &str = "agm_general_convexity";

pub fn agm_general_channels(r: f64, alpha: f64, obj: &Objective) -> Result<Vec<AccumulatorSpec>> {
    let (xs, fs) = optimum(obj)?;
    let o = obj.clone();
    let xs_d = xs.clone();
    let dissipation = AccumulatorSpec::new(
        AGM_GENERAL_DISSIPATION,
        move |s: f64, x: &DVector<f64>, v: &DVector<f64>| {
            let dx = x - &xs_d;
            let momentum = (v * s + &dx * alpha).norm_squared();
            0.5 * (2.0 * r - 3.0 * alpha) * s.powf(alpha - 3.0) * momentum
                + 0.5
                    * alpha
                    * (alpha + 1.0 - r)
                    * (alpha + 2.0)
                    * s.powf(alpha - 3.0)
                    * dx.norm_squared()
        },
    );
    let convexity = AccumulatorSpec::new(
        AGM_GENERAL_CONVEXITY,
        move |s: f64, x: &DVector<f64>, _v: &DVector<f64>| {
            alpha * s.powf(alpha - 1.0) * gap_at(&o, &xs, fs, x)
        },
    );
    Ok(vec![dissipation, convexity])
}

/// The general-(r, α) law. `t0 = None` accumulates from the trajectory start
/// (the t0 → 0 convention, valid when the boundary limit exists).
pub fn energy_agm_general(
    r: f64,
    alpha: f64,
    obj: &Objective,
    traj: &Trajectory,
    t0: Option<f64>,
    t: f64,
) -> Result<EnergyBreakdown> {
    expect_family(
        traj,
        "vanishing-damping",
        matches!(traj.family(), OdeFamily::VanishingDamping { r: rr } if rr == r),
    )?;
    let (xs, fs) = optimum(obj)?;
    let (x, v) = traj.dense_eval(t)?;
    let dx = &x - &xs;
    Ok(EnergyBreakdown::compose(
        "agm_general",
        t,
        vec![
            ("value_term", t.powf(alpha) * (obj.value(&x) - fs)),
            (
                "momentum_term",
                0.5 * t.powf(alpha - 2.0) * (&v * t + &dx * alpha).norm_squared(),
            ),
            (
                "distance_term",
                0.5 * alpha * (alpha + 1.0 - r) * t.powf(alpha - 2.0) * dx.norm_squared(),
            ),
        ],
        channel_delta(traj, AGM_GENERAL_DISSIPATION, t0, t)?,
        channel_delta(traj, AGM_GENERAL_CONVEXITY, t0, t)?,
        None,
    ))
}

/// Closed-form t0 → 0 limit for α = 2: (5 − r)‖X₀ − X★‖².
pub fn agm_general_reference(r: f64, alpha: f64, problem: &ProblemInstance) -> Result<f64> {
    if alpha != 2.0 {
        return Err(Error::InvalidParameter(
            "closed-form limit implemented for alpha = 2 only".into(),
        ));
    }
    problem
        .initial_distance_sq()
        .map(|d| (5.0 - r) * d)
        .ok_or_else(|| Error::Metadata("reference needs minimizer metadata".into()))
}

// ---------------------------------------------------------------------------
// Rearranged law for r > 3 (α = 2, t0 = 0)
// ---------------------------------------------------------------------------

pub const AGM_GT3_SPEED: &str = "agm_gt3_speed";
pub const AGM_GT3_CONVEXITY: &str = "agm_gt3_convexity";

pub fn agm_r_gt3_channels(r: f64, obj: &Objective) -> Result<Vec<AccumulatorSpec>> {
    if !(r > 3.0) {
        return Err(Error::InvalidParameter(format!(
            "rearranged law needs r > 3, got {r}"
        )));
    }
    let (xs, fs) = optimum(obj)?;
    let o = obj.clone();
    let speed = AccumulatorSpec::new(
        AGM_GT3_SPEED,
        move |s: f64, _x: &DVector<f64>, v: &DVector<f64>| (r - 3.0) * s * v.norm_squared(),
    );
    let convexity = AccumulatorSpec::new(
        AGM_GT3_CONVEXITY,
        move |s: f64, x: &DVector<f64>, _v: &DVector<f64>| 2.0 * s * gap_at(&o, &xs, fs, x),
    );
    Ok(vec![speed, convexity])
}

/// E ≡ (5−r)‖X₀−X★‖² with every t-dependent term nonnegative when r > 3.
pub fn energy_agm_r_gt3(
    r: f64,
    problem: &ProblemInstance,
    traj: &Trajectory,
    t: f64,
) -> Result<EnergyBreakdown> {
    if !(r > 3.0) {
        return Err(Error::InvalidParameter(format!(
            "rearranged law needs r > 3, got {r}"
        )));
    }
    expect_family(
        traj,
        "vanishing-damping",
        matches!(traj.family(), OdeFamily::VanishingDamping { r: rr } if rr == r),
    )?;
    let obj = &problem.objective;
    let (xs, fs) = optimum(obj)?;
    let (x, v) = traj.dense_eval(t)?;
    let dx = &x - &xs;
    let d0 = (&problem.x0 - &xs).norm_squared();
    Ok(EnergyBreakdown::compose(
        "agm_r_gt3",
        t,
        vec![
            ("value_term", t * t * (obj.value(&x) - fs)),
            ("momentum_term", 0.5 * (&v * t + &dx * 2.0).norm_squared()),
            ("distance_term", (r - 3.0) * dx.norm_squared()),
            ("initial_offset", -2.0 * (r - 3.0) * d0),
        ],
        channel_delta(traj, AGM_GT3_SPEED, None, t)?,
        channel_delta(traj, AGM_GT3_CONVEXITY, None, t)?,
        None,
    ))
}

// ---------------------------------------------------------------------------
// Law for 0 ≤ r < 3 with α = 2r/3, started at t0 > 0
// ---------------------------------------------------------------------------

pub const AGM_LT3_DISTANCE: &str = "agm_lt3_distance";
pub const AGM_LT3_CONVEXITY: &str = "agm_lt3_convexity";

pub fn agm_r_lt3_channels(r: f64, obj: &Objective) -> Result<Vec<AccumulatorSpec>> {
    if !(0.0..3.0).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "this law needs 0 <= r < 3, got {r}"
        )));
    }
    let (xs, fs) = optimum(obj)?;
    let o = obj.clone();
    let alpha = 2.0 * r / 3.0;
    let xs_d = xs.clone();
    let distance = AccumulatorSpec::new(
        AGM_LT3_DISTANCE,
        move |s: f64, x: &DVector<f64>, _v: &DVector<f64>| {
            2.0 / 27.0
                * r
                * (3.0 - r)
                * (3.0 + r)
                * s.powf(alpha - 3.0)
                * (x - &xs_d).norm_squared()
        },
    );
    let convexity = AccumulatorSpec::new(
        AGM_LT3_CONVEXITY,
        move |s: f64, x: &DVector<f64>, _v: &DVector<f64>| {
            alpha * s.powf(alpha - 1.0) * gap_at(&o, &xs, fs, x)
        },
    );
    Ok(vec![distance, convexity])
}

pub fn energy_agm_r_lt3(
    r: f64,
    obj: &Objective,
    traj: &Trajectory,
    t0: f64,
    t: f64,
) -> Result<EnergyBreakdown> {
    if !(0.0..3.0).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "this law needs 0 <= r < 3, got {r}"
        )));
    }
    if !(t0 > 0.0) {
        return Err(Error::InvalidParameter(
            "this law starts at a nonzero time".into(),
        ));
    }
    expect_family(
        traj,
        "vanishing-damping",
        matches!(traj.family(), OdeFamily::VanishingDamping { r: rr } if rr == r),
    )?;
    let (xs, fs) = optimum(obj)?;
    let alpha = 2.0 * r / 3.0;
    let (x, v) = traj.dense_eval(t)?;
    let dx = &x - &xs;
    Ok(EnergyBreakdown::compose(
        "agm_r_lt3",
        t,
        vec![
            ("value_term", t.powf(alpha) * (obj.value(&x) - fs)),
            (
                "distance_term",
                r * (3.0 - r) / 9.0 * t.powf(alpha - 2.0) * dx.norm_squared(),
            ),
            (
                "momentum_term",
                0.5 * t.powf(alpha - 2.0) * (&v * t + &dx * alpha).norm_squared(),
            ),
        ],
        channel_delta(traj, AGM_LT3_DISTANCE, Some(t0), t)?,
        channel_delta(traj, AGM_LT3_CONVEXITY, Some(t0), t)?,
        None,
    ))
}

// ---------------------------------------------------------------------------
// Rescaled law (multiply the flow by t^β before integrating)
// ---------------------------------------------------------------------------

pub const RESCALED_MOMENTUM: &str = "rescaled_momentum";
pub const RESCALED_DISTANCE: &str = "rescaled_distance";
pub const RESCALED_GROWTH: &str = "rescaled_growth";

/// Exponents that turn the growth hypothesis H₁(γ) into the law's final
/// integrand: α = 2r/(γ+2), β = 2(γ−1)r/(γ+2).
pub fn h1_exponents(r: f64, gamma: f64) -> Result<(f64, f64)> {
    if !(gamma >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "growth parameter must satisfy gamma >= 1, got {gamma}"
        )));
    }
    Ok((
        2.0 * r / (gamma + 2.0),
        2.0 * (gamma - 1.0) * r / (gamma + 2.0),
    ))
}

/// Exponents (α, β) = (r−1, 3−r) reproducing the classical r ≥ 3 Lyapunov
/// analysis as a rescaled conservation law.
pub fn classical_exponents(r: f64) -> (f64, f64) {
    (r - 1.0, 3.0 - r)
}

pub fn rescaled_channels(
    r: f64,
    alpha: f64,
    beta: f64,
    obj: &Objective,
) -> Result<Vec<AccumulatorSpec>> {
    let (xs, fs) = optimum(obj)?;
    let o = obj.clone();
    let xs_m = xs.clone();
    let xs_d = xs.clone();
    let momentum = AccumulatorSpec::new(
        RESCALED_MOMENTUM,
        move |s: f64, x: &DVector<f64>, v: &DVector<f64>| {
            0.5 * (2.0 * r - 3.0 * alpha - beta)
                * s.powf(alpha + beta - 3.0)
                * (v * s + (x - &xs_m) * alpha).norm_squared()
        },
    );
    let distance = AccumulatorSpec::new(
        RESCALED_DISTANCE,
        move |s: f64, x: &DVector<f64>, _v: &DVector<f64>| {
            0.5 * alpha
                * (alpha + 1.0 - r)
                * (alpha - beta + 2.0)
                * s.powf(alpha + beta - 3.0)
                * (x - &xs_d).norm_squared()
        },
    );
    let growth = AccumulatorSpec::new(
        RESCALED_GROWTH,
        move |s: f64, x: &DVector<f64>, _v: &DVector<f64>| {
            s.powf(alpha + beta - 1.0)
                * ((alpha + beta) * (fs - o.value(x)) - alpha * o.gradient(x).dot(&(&xs - x)))
        },
    );
    Ok(vec![momentum, distance, growth])
}

/// The rescaled law with explicit exponents. With the H₁ preset the growth
/// integrand carries the residual f★ − f − (1/γ)⟨∇f, X★ − X⟩ weighted by
/// (α+β); with the classical preset it reduces to the known Lyapunov
/// function. A warning is attached when γ is given and r > 1 + 2/γ, where
/// term signs are no longer guaranteed.
#[allow(clippy::too_many_arguments)]
pub fn energy_rescaled(
    r: f64,
    alpha: f64,
    beta: f64,
    gamma: Option<f64>,
    obj: &Objective,
    traj: &Trajectory,
    t0: Option<f64>,
    t: f64,
) -> Result<EnergyBreakdown> {
    if let Some(g) = gamma {
        if !(g >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "growth parameter must satisfy gamma >= 1, got {g}"
            )));
        }
        let declared = obj.h1_gamma().unwrap_or(1.0);
        if g > declared + 1e-12 {
            return Err(Error::Metadata(format!(
                "objective declares growth hypothesis up to gamma = {declared}, requested {g}"
            )));
        }
    }
    expect_family(
        traj,
        "vanishing-damping",
        matches!(traj.family(), OdeFamily::VanishingDamping { r: rr } if rr == r),
    )?;
    let (xs, fs) = optimum(obj)?;
    let (x, v) = traj.dense_eval(t)?;
    let dx = &x - &xs;
    let warning = gamma.and_then(|g| {
        (r > 1.0 + 2.0 / g).then(|| {
            format!(
                "r = {r} exceeds 1 + 2/gamma = {}; bound terms may be negative",
                1.0 + 2.0 / g
            )
        })
    });
    Ok(EnergyBreakdown::compose(
        "rescaled",
        t,
        vec![
            ("value_term", t.powf(alpha + beta) * (obj.value(&x) - fs)),
            (
                "momentum_term",
                0.5 * t.powf(alpha + beta - 2.0) * (&v * t + &dx * alpha).norm_squared(),
            ),
            (
                "distance_term",
                0.5 * alpha * (alpha + 1.0 - r) * t.powf(alpha + beta - 2.0) * dx.norm_squared(),
            ),
        ],
        channel_delta(traj, RESCALED_MOMENTUM, t0, t)?
            + channel_delta(traj, RESCALED_DISTANCE, t0, t)?,
        channel_delta(traj, RESCALED_GROWTH, t0, t)?,
        warning,
    ))
}

/// Closed-form t0 → 0 limit for the classical preset: ((r−1)²/2)‖X₀−X★‖².
pub fn classical_reference(r: f64, problem: &ProblemInstance) -> Result<f64> {
    problem
        .initial_distance_sq()
        .map(|d| 0.5 * (r - 1.0) * (r - 1.0) * d)
        .ok_or_else(|| Error::Metadata("reference needs minimizer metadata".into()))
}

// ---------------------------------------------------------------------------
// Constant-damping (strongly convex) law
// ---------------------------------------------------------------------------

pub const SCAGM_SPEED: &str = "scagm_speed";
pub const SCAGM_GAP: &str = "scagm_gap";

pub fn scagm_channels(mu: f64, obj: &Objective) -> Result<Vec<AccumulatorSpec>> {
    check_strong_convexity(mu, obj)?;
    let (xs, fs) = optimum(obj)?;
    let o = obj.clone();
    let rmu = mu.sqrt();
    let xs_g = xs.clone();
    let speed = AccumulatorSpec::new(
        SCAGM_SPEED,
        move |s: f64, _x: &DVector<f64>, v: &DVector<f64>| {
            0.5 * rmu * (rmu * s).exp() * v.norm_squared()
        },
    );
    let gap = AccumulatorSpec::new(
        SCAGM_GAP,
        move |s: f64, x: &DVector<f64>, _v: &DVector<f64>| {
            let strong_gap = gap_at(&o, &xs_g, fs, x) - 0.5 * mu * (x - &xs_g).norm_squared();
            rmu * (rmu * s).exp() * strong_gap
        },
    );
    Ok(vec![speed, gap])
}

fn check_strong_convexity(mu: f64, obj: &Objective) -> Result<()> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "strong convexity parameter must be positive, got {mu}"
        )));
    }
    if obj.strong_convexity() + 1e-12 < mu {
        return Err(Error::Metadata(format!(
            "objective is only {}-strongly convex, law requested mu = {mu}",
            obj.strong_convexity()
        )));
    }
    Ok(())
}

/// E ≡ f(X₀) − f★ along the constant-damping flow.
pub fn energy_scagm(
    mu: f64,
    problem: &ProblemInstance,
    traj: &Trajectory,
    t: f64,
) -> Result<EnergyBreakdown> {
    check_strong_convexity(mu, &problem.objective)?;
    expect_family(
        traj,
        "constant-damping",
        matches!(traj.family(), OdeFamily::ConstantDamping { mu: m } if m == mu),
    )?;
    let obj = &problem.objective;
    let (xs, fs) = optimum(obj)?;
    let rmu = mu.sqrt();
    let (x, v) = traj.dense_eval(t)?;
    let dx = &x - &xs;
    let d0 = (&problem.x0 - &xs).norm_squared();
    let weight = (rmu * t).exp();
    Ok(EnergyBreakdown::compose(
        "scagm",
        t,
        vec![
            ("initial_offset", -0.5 * mu * d0),
            ("value_term", weight * (obj.value(&x) - fs)),
            (
                "momentum_term",
                weight * 0.5 * (&v + &dx * rmu).norm_squared(),
            ),
        ],
        channel_delta(traj, SCAGM_SPEED, None, t)?,
        channel_delta(traj, SCAGM_GAP, None, t)?,
        None,
    ))
}

pub fn scagm_reference(problem: &ProblemInstance) -> Result<f64> {
    problem
        .initial_gap()
        .ok_or_else(|| Error::Metadata("reference needs f_star metadata".into()))
}

// ---------------------------------------------------------------------------
// Gradient-flow law
// ---------------------------------------------------------------------------

pub const GF_SPEED: &str = "gf_speed";
pub const GF_CONVEXITY: &str = "gf_convexity";

pub fn gradient_flow_channels(obj: &Objective) -> Result<Vec<AccumulatorSpec>> {
    let (xs, fs) = optimum(obj)?;
    let o = obj.clone();
    let speed = AccumulatorSpec::new(
        GF_SPEED,
        move |s: f64, _x: &DVector<f64>, v: &DVector<f64>| s * v.norm_squared(),
    );
    let convexity = AccumulatorSpec::new(
        GF_CONVEXITY,
        move |_s: f64, x: &DVector<f64>, _v: &DVector<f64>| gap_at(&o, &xs, fs, x),
    );
    Ok(vec![speed, convexity])
}

/// E ≡ −½‖X₀ − X★‖² along the gradient flow.
pub fn energy_gradient_flow(
    problem: &ProblemInstance,
    traj: &Trajectory,
    t: f64,
) -> Result<EnergyBreakdown> {
    expect_family(
        traj,
        "gradient-flow",
        matches!(traj.family(), OdeFamily::GradientFlow),
    )?;
    let obj = &problem.objective;
    let (xs, fs) = optimum(obj)?;
    let (x, _v) = traj.dense_eval(t)?;
    let dx = &x - &xs;
    let d0 = (&problem.x0 - &xs).norm_squared();
    Ok(EnergyBreakdown::compose(
        "gradient_flow",
        t,
        vec![
            ("value_term", t * (obj.value(&x) - fs)),
            ("distance_term", 0.5 * dx.norm_squared()),
            ("initial_offset", -d0),
        ],
        channel_delta(traj, GF_SPEED, None, t)?,
        channel_delta(traj, GF_CONVEXITY, None, t)?,
        None,
    ))
}

pub fn gradient_flow_reference(problem: &ProblemInstance) -> Result<f64> {
    problem
        .initial_distance_sq()
        .map(|d| -0.5 * d)
        .ok_or_else(|| Error::Metadata("reference needs minimizer metadata".into()))
}

// ---------------------------------------------------------------------------
// Terminal-damping law, evaluated post hoc by composite Simpson
// ---------------------------------------------------------------------------

/// The general terminal-centered law. The center (typically the extrapolated
/// X(T)) is unknown during forward integration, so both integrals are
/// evaluated by composite Simpson over dense output with a self-estimated
/// quadrature error that must stay below `quad_tol`.
pub fn energy_ogmg_general(
    r: f64,
    alpha: f64,
    center: &DVector<f64>,
    obj: &Objective,
    traj: &Trajectory,
    t: f64,
    quad_tol: f64,
) -> Result<EnergyBreakdown> {
    let series = ogmg_breakdown_series(r, alpha, center, obj, traj, &[t], quad_tol)?;
    Ok(series.into_iter().next().unwrap())
}

/// Batch evaluation of the terminal-centered law at several times in one
/// cumulative quadrature pass. Times must be nondecreasing and within the
/// trajectory span.
pub fn ogmg_breakdown_series(
    r: f64,
    alpha: f64,
    center: &DVector<f64>,
    obj: &Objective,
    traj: &Trajectory,
    times: &[f64],
    quad_tol: f64,
) -> Result<Vec<EnergyBreakdown>> {
    let horizon = match traj.family() {
        OdeFamily::TerminalDamping { r: rr, horizon } if rr == r => horizon,
        _ => {
            return Err(Error::Configuration(format!(
                "law expects a terminal-damping trajectory with r = {r}, got {}",
                traj.family().id()
            )))
        }
    };
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "evaluation times must be nondecreasing".into(),
        ));
    }
    let f_center = obj.value(center);

    let diss_integrand = |s: f64, x: &DVector<f64>, v: &DVector<f64>| -> f64 {
        let tau = horizon - s;
        let dx = x - center;
        let momentum = (v * tau - &dx * alpha).norm_squared();
        0.5 * (3.0 * alpha - 2.0 * r) * tau.powf(alpha - 3.0) * momentum
            - 0.5
                * alpha
                * (alpha + 1.0 - r)
                * (alpha + 2.0)
                * tau.powf(alpha - 3.0)
                * dx.norm_squared()
    };
    let conv_integrand = |s: f64, x: &DVector<f64>, _v: &DVector<f64>| -> f64 {
        let tau = horizon - s;
        let gap = f_center - obj.value(x) - obj.gradient(x).dot(&(center - x));
        -2.0 * alpha * tau.powf(alpha - 1.0) * gap
    };

    let mut out = Vec::with_capacity(times.len());
    let mut cursor = Quadrature::new(traj);
    for &t in times {
        let (diss, conv) = cursor.advance_to(t, &diss_integrand, &conv_integrand)?;
        if cursor.error_estimate > quad_tol {
            return Err(Error::Quadrature {
                estimate: cursor.error_estimate,
                tolerance: quad_tol,
            });
        }
        let (x, v) = traj.dense_eval(t)?;
        let tau = horizon - t;
        let dx = &x - center;
        out.push(EnergyBreakdown::compose(
            "ogmg_general",
            t,
            vec![
                (
                    "value_term",
                    2.0 * tau.powf(alpha) * (obj.value(&x) - f_center),
                ),
                (
                    "momentum_term",
                    0.5 * tau.powf(alpha - 2.0) * (&v * tau - &dx * alpha).norm_squared(),
                ),
                (
                    "distance_term",
                    0.5 * alpha * (alpha + 1.0 - r) * tau.powf(alpha - 2.0) * dx.norm_squared(),
                ),
            ],
            diss,
            conv,
            None,
        ));
    }
    Ok(out)
}

/// Closed-form initial value of the terminal-centered law (uses Ẋ(0) = 0):
/// 2T^α(f(X₀)−f(X_c)) + (α²/2 + α(α+1−r)/2)·T^{α−2}‖X₀−X_c‖².
pub fn ogmg_reference(
    r: f64,
    alpha: f64,
    problem: &ProblemInstance,
    center: &DVector<f64>,
    horizon: f64,
) -> Result<f64> {
    if !horizon.is_finite() || !(horizon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "reference needs a positive horizon, got {horizon}"
        )));
    }
    let obj = &problem.objective;
    let f_center = obj.value(center);
    let d0 = (&problem.x0 - center).norm_squared();
    Ok(
        2.0 * horizon.powf(alpha) * (obj.value(&problem.x0) - f_center)
            + (0.5 * alpha * alpha + 0.5 * alpha * (alpha + 1.0 - r))
                * horizon.powf(alpha - 2.0)
                * d0,
    )
}

type IntegrandRef<'a> = &'a dyn Fn(f64, &DVector<f64>, &DVector<f64>) -> f64;

/// Cumulative two-integral Simpson pass over the dense grid, with Richardson
/// self-error from panel halving.
struct Quadrature<'a> {
    traj: &'a Trajectory,
    node: usize,
    t_done: f64,
    diss: f64,
    conv: f64,
    error_estimate: f64,
}

impl<'a> Quadrature<'a> {
    fn new(traj: &'a Trajectory) -> Self {
        Quadrature {
            traj,
            node: 0,
            t_done: traj.start_time(),
            diss: 0.0,
            conv: 0.0,
            error_estimate: 0.0,
        }
    }

    fn advance_to(
        &mut self,
        t: f64,
        diss: IntegrandRef<'_>,
        conv: IntegrandRef<'_>,
    ) -> Result<(f64, f64)> {
        if t < self.t_done {
            return Err(Error::InvalidParameter(
                "quadrature cursor cannot move backwards".into(),
            ));
        }
        let times = self.traj.times();
        while self.node + 1 < times.len() && times[self.node + 1] <= t {
            let (a, b) = (times[self.node], times[self.node + 1]);
            self.panel(a, b, diss, conv)?;
            self.node += 1;
            self.t_done = b;
        }
        if t > self.t_done {
            self.panel(self.t_done, t, diss, conv)?;
            self.t_done = t;
        }
        Ok((self.diss, self.conv))
    }

    fn panel(
        &mut self,
        a: f64,
        b: f64,
        diss: IntegrandRef<'_>,
        conv: IntegrandRef<'_>,
    ) -> Result<()> {
        let eval = |t: f64| -> Result<(f64, f64)> {
            let (x, v) = self.traj.dense_eval(t)?;
            Ok((diss(t, &x, &v), conv(t, &x, &v)))
        };
        let h = b - a;
        let (f0, g0) = eval(a)?;
        let (f1, g1) = eval(a + 0.25 * h)?;
        let (f2, g2) = eval(a + 0.5 * h)?;
        let (f3, g3) = eval(a + 0.75 * h)?;
        let (f4, g4) = eval(b)?;
        let coarse_d = h / 6.0 * (f0 + 4.0 * f2 + f4);
        let coarse_c = h / 6.0 * (g0 + 4.0 * g2 + g4);
        let fine_d = h / 12.0 * (f0 + 4.0 * f1 + 2.0 * f2 + 4.0 * f3 + f4);
        let fine_c = h / 12.0 * (g0 + 4.0 * g1 + 2.0 * g2 + 4.0 * g3 + g4);
        self.diss += fine_d;
        self.conv += fine_c;
        self.error_estimate += ((fine_d - coarse_d).abs() + (fine_c - coarse_c).abs()) / 15.0;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorConfig};
    use crate::problems::make_quadratic;

    #[test]
    fn h1_exponents_reduce_to_two_thirds_at_gamma_one() {
        let (a, b) = h1_exponents(1.5, 1.0).unwrap();
        assert!((a - 1.0).abs() < 1e-15);
        assert!(b.abs() < 1e-15);
        let (a, b) = h1_exponents(3.0, 1.0).unwrap();
        assert!((a - 2.0).abs() < 1e-15);
        assert!(b.abs() < 1e-15);
    }

    #[test]
    fn classical_exponent_values() {
        assert_eq!(classical_exponents(5.0), (4.0, -2.0));
    }

    #[test]
    fn stationary_start_gives_zero_breakdown() {
        let obj = make_quadratic(&[1.0], &[0.0], 0.0).unwrap();
        let p = ProblemInstance::new(
            obj.clone(),
            DVector::from_column_slice(&[0.0]),
            "stationary",
        )
        .unwrap();
        let config = IntegratorConfig {
            sample_count: 64,
            ..Default::default()
        };
        let traj = integrate(
            OdeFamily::VanishingDamping { r: 3.0 },
            &p,
            1e-6,
            5.0,
            &config,
            agm_r3_channels(&obj).unwrap(),
        )
        .unwrap();
        let b = energy_agm_r3(&obj, &traj, 3.0).unwrap();
        assert!(b.total.abs() < 1e-12);
        for (_, v) in &b.boundary {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn missing_channels_is_a_configuration_error() {
        let obj = make_quadratic(&[1.0], &[0.0], 0.0).unwrap();
        let p = ProblemInstance::new(obj.clone(), DVector::from_column_slice(&[1.0]), "q").unwrap();
        let config = IntegratorConfig {
            sample_count: 32,
            ..Default::default()
        };
        let traj = integrate(
            OdeFamily::VanishingDamping { r: 3.0 },
            &p,
            1e-6,
            2.0,
            &config,
            Vec::new(),
        )
        .unwrap();
        assert!(matches!(
            energy_agm_r3(&obj, &traj, 1.0),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn missing_metadata_is_reported() {
        let obj = make_quadratic(&[1.0], &[0.0], 0.0)
            .unwrap()
            .without_optimum();
        assert!(matches!(agm_r3_channels(&obj), Err(Error::Metadata(_))));
    }

    #[test]
    fn gt3_law_rejects_small_r() {
        let obj = make_quadratic(&[1.0], &[0.0], 0.0).unwrap();
        assert!(agm_r_gt3_channels(2.0, &obj).is_err());
    }

    #[test]
    fn lt3_law_rejects_out_of_range_r() {
        let obj = make_quadratic(&[1.0], &[0.0], 0.0).unwrap();
        assert!(agm_r_lt3_channels(3.0, &obj).is_err());
        assert!(agm_r_lt3_channels(-0.5, &obj).is_err());
    }

    #[test]
    fn scagm_checks_strong_convexity_metadata() {
        let obj = make_quadratic(&[0.5], &[0.0], 0.0).unwrap();
        assert!(matches!(scagm_channels(1.0, &obj), Err(Error::Metadata(_))));
    }

    #[test]
    fn rescaled_checks_growth_declaration() {
        let obj = make_quadratic(&[1.0], &[0.0], 0.0).unwrap();
        let p = ProblemInstance::new(obj.clone(), DVector::from_column_slice(&[1.0]), "q").unwrap();
        let config = IntegratorConfig {
            sample_count: 32,
            ..Default::default()
        };
        let (alpha, beta) = h1_exponents(1.0, 4.0).unwrap();
        let traj = integrate(
            OdeFamily::VanishingDamping { r: 1.0 },
            &p,
            1e-6,
            2.0,
            &config,
            rescaled_channels(1.0, alpha, beta, &obj).unwrap(),
        )
        .unwrap();
        // quadratics declare gamma = 2; requesting 4 is a metadata error
        assert!(matches!(
            energy_rescaled(1.0, alpha, beta, Some(4.0), &obj, &traj, None, 1.0),
            Err(Error::Metadata(_))
        ));
    }
}
