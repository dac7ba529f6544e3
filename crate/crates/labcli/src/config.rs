//! Experiment configuration: strict JSON schema, no defaults for
//! physics-relevant parameters, and semantic validation that reports every
//! missing or conflicting field at once.

use serde::Deserialize;

use agdlab::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ode,
    Discrete,
    Concat,
    Correspondence,
}

/// Raw configuration as read from JSON. Unknown keys are rejected.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: Option<String>,
    pub problem: String,
    /// Optional start-point override for the catalog problem.
    pub x0: Option<Vec<f64>>,
    pub mode: Mode,
    pub law: Option<String>,
    pub method: Option<String>,
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    /// Stepsize in units of 1/L.
    pub s_per_l: Option<f64>,
    pub k: Option<usize>,
    pub k_total: Option<usize>,
    pub k_ladder: Option<Vec<usize>>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub t0: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub sample_count: Option<usize>,
    pub seed: Option<u64>,
    /// Adds seeded oracle self-check certificates to the report.
    pub oracle_checks: Option<bool>,
}

/// Laws runnable in ODE mode, with their validated parameters.
#[derive(Clone, Debug)]
pub enum OdeLaw {
    AgmR3,
    AgmGeneral { r: f64, alpha: f64, t0: Option<f64> },
    AgmRGt3 { r: f64 },
    AgmRLt3 { r: f64, t0: f64 },
    Growth { r: f64, gamma: f64, t0: f64 },
    Classical { r: f64 },
    ScAgm { mu: f64 },
    GradientFlow,
    Ogmg { r: f64 },
    OgmgEnergy { r: f64 },
    Hamiltonian,
}

#[derive(Clone, Debug)]
pub enum DiscreteMethod {
    Ssse { s_per_l: f64 },
    Ogmg,
    Oblg,
    Nesterov,
}

#[derive(Clone, Debug)]
pub enum ConcatKind {
    Continuous { horizon: f64 },
    SingleRun { k_total: usize, s_per_l: f64 },
    SlopeLadder { k_ladder: Vec<usize>, s_per_l: f64 },
}

#[derive(Clone, Debug)]
pub enum CorrespondenceMethod {
    Ogmg,
    Oblg,
}

/// A fully validated experiment plan.
#[derive(Clone, Debug)]
pub enum Plan {
    Ode {
        law: OdeLaw,
        horizon: f64,
    },
    Discrete {
        method: DiscreteMethod,
        budget: usize,
    },
    Concat(ConcatKind),
    Correspondence {
        method: CorrespondenceMethod,
        horizon: f64,
        k_ladder: Vec<usize>,
    },
}

/// All laws known to ODE mode, with the parameters each requires beyond the
/// horizon. Used by validation and by `labcli list-laws`.
pub const LAW_TABLE: &[(&str, &str, &str)] = &[
    (
        "agm_r3",
        "",
        "canonical vanishing-damping conservation law (r = 3)",
    ),
    (
        "agm_general",
        "r, alpha [, t0]",
        "general (r, alpha) vanishing-damping law",
    ),
    ("agm_r_gt3", "r > 3", "rearranged nonnegative-term law"),
    (
        "agm_r_lt3",
        "0 <= r < 3, t0",
        "low-damping law started at t0",
    ),
    (
        "h1",
        "r, gamma >= 1, t0",
        "growth-hypothesis law (rescaled flow)",
    ),
    (
        "classical",
        "r",
        "classical rescaled preset (alpha, beta) = (r-1, 3-r)",
    ),
    (
        "scagm",
        "mu",
        "constant-damping law for strongly convex objectives",
    ),
    ("gradient_flow", "", "first-order flow law"),
    (
        "ogmg",
        "r <= -3",
        "terminal-damping flow: extrapolation + terminal-gradient bound",
    ),
    (
        "ogmg_energy",
        "r <= -3",
        "terminal-centered conservation law (Simpson-evaluated)",
    ),
    (
        "hamiltonian",
        "",
        "time-dependent Hamiltonian identity along the r = 3 flow",
    ),
];

struct Check<'a> {
    cfg: &'a ExperimentConfig,
    issues: Vec<String>,
    used: Vec<&'static str>,
}

impl<'a> Check<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Check {
            cfg,
            issues: Vec::new(),
            used: Vec::new(),
        }
    }

    fn require_f64(&mut self, name: &'static str, value: Option<f64>) -> f64 {
        self.used.push(name);
        match value {
            Some(v) => v,
            None => {
                self.issues.push(format!("missing required field '{name}'"));
                f64::NAN
            }
        }
    }

    fn require_usize(&mut self, name: &'static str, value: Option<usize>) -> usize {
        self.used.push(name);
        match value {
            Some(v) => v,
            None => {
                self.issues.push(format!("missing required field '{name}'"));
                0
            }
        }
    }

    fn allow(&mut self, name: &'static str) {
        self.used.push(name);
    }

    fn constraint(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.issues.push(msg.into());
        }
    }

    /// Every parameter field that was set but not consumed is a conflict.
    fn reject_unused(&mut self) {
        let c = self.cfg;
        let fields: [(&str, bool); 11] = [
            ("r", c.r.is_some()),
            ("alpha", c.alpha.is_some()),
            ("gamma", c.gamma.is_some()),
            ("mu", c.mu.is_some()),
            ("s_per_l", c.s_per_l.is_some()),
            ("k", c.k.is_some()),
            ("k_total", c.k_total.is_some()),
            ("k_ladder", c.k_ladder.is_some()),
            ("T", c.horizon.is_some()),
            ("t0", c.t0.is_some()),
            ("law", c.law.is_some()),
        ];
        for (name, set) in fields {
            if set && !self.used.contains(&name) {
                self.issues.push(format!(
                    "field '{name}' is not used by this mode/law/method"
                ));
            }
        }
    }

    fn finish(mut self, plan: Plan) -> Result<Plan, Error> {
        self.reject_unused();
        if self.issues.is_empty() {
            Ok(plan)
        } else {
            Err(Error::Configuration(self.issues.join("; ")))
        }
    }
}

impl ExperimentConfig {
    /// Semantic validation; returns a typed plan, or a configuration error
    /// listing every missing or conflicting field.
    pub fn validate(&self) -> Result<Plan, Error> {
        match self.mode {
            Mode::Ode => self.validate_ode(),
            Mode::Discrete => self.validate_discrete(),
            Mode::Concat => self.validate_concat(),
            Mode::Correspondence => self.validate_correspondence(),
        }
    }

    fn validate_ode(&self) -> Result<Plan, Error> {
        let mut chk = Check::new(self);
        chk.allow("law");
        let law_name = match &self.law {
            Some(l) => l.clone(),
            None => {
                chk.issues.push("ode mode requires 'law'".into());
                String::new()
            }
        };
        let horizon = chk.require_f64("T", self.horizon);
        chk.constraint(
            horizon.is_nan() || horizon > 0.0,
            format!("T must be positive, got {horizon}"),
        );

        let law = match law_name.as_str() {
            "agm_r3" => OdeLaw::AgmR3,
            "agm_general" => {
                let r = chk.require_f64("r", self.r);
                let alpha = chk.require_f64("alpha", self.alpha);
                chk.allow("t0");
                OdeLaw::AgmGeneral {
                    r,
                    alpha,
                    t0: self.t0,
                }
            }
            "agm_r_gt3" => {
                let r = chk.require_f64("r", self.r);
                chk.constraint(r.is_nan() || r > 3.0, format!("r must exceed 3, got {r}"));
                OdeLaw::AgmRGt3 { r }
            }
            "agm_r_lt3" => {
                let r = chk.require_f64("r", self.r);
                let t0 = chk.require_f64("t0", self.t0);
                chk.constraint(
                    r.is_nan() || (0.0..3.0).contains(&r),
                    format!("r must lie in [0, 3), got {r}"),
                );
                chk.constraint(t0.is_nan() || t0 > 0.0, "t0 must be positive");
                OdeLaw::AgmRLt3 { r, t0 }
            }
            "h1" => {
                let r = chk.require_f64("r", self.r);
                let gamma = chk.require_f64("gamma", self.gamma);
                let t0 = chk.require_f64("t0", self.t0);
                chk.constraint(gamma.is_nan() || gamma >= 1.0, "gamma must be >= 1");
                OdeLaw::Growth { r, gamma, t0 }
            }
            "classical" => OdeLaw::Classical {
                r: chk.require_f64("r", self.r),
            },
            "scagm" => OdeLaw::ScAgm {
                mu: chk.require_f64("mu", self.mu),
            },
            "gradient_flow" => OdeLaw::GradientFlow,
            "ogmg" | "ogmg_energy" => {
                let r = chk.require_f64("r", self.r);
                chk.constraint(r.is_nan() || r <= -3.0, format!("r must be <= -3, got {r}"));
                if law_name == "ogmg" {
                    OdeLaw::Ogmg { r }
                } else {
                    OdeLaw::OgmgEnergy { r }
                }
            }
            "hamiltonian" => OdeLaw::Hamiltonian,
            other => {
                chk.issues
                    .push(format!("unknown law '{other}'; see `labcli list-laws`"));
                OdeLaw::AgmR3
            }
        };
        chk.finish(Plan::Ode { law, horizon })
    }

    fn validate_discrete(&self) -> Result<Plan, Error> {
        let mut chk = Check::new(self);
        let budget = chk.require_usize("k", self.k);
        let method = match self.method.as_deref() {
            Some("ssse") => DiscreteMethod::Ssse {
                s_per_l: chk.require_f64("s_per_l", self.s_per_l),
            },
            Some("ogmg") => DiscreteMethod::Ogmg,
            Some("oblg") => DiscreteMethod::Oblg,
            Some("nesterov") => DiscreteMethod::Nesterov,
            Some(other) => {
                chk.issues
                    .push(format!("unknown discrete method '{other}'"));
                DiscreteMethod::Nesterov
            }
            None => {
                chk.issues.push("discrete mode requires 'method'".into());
                DiscreteMethod::Nesterov
            }
        };
        chk.constraint(budget > 0, "k must be at least 1");
        chk.finish(Plan::Discrete { method, budget })
    }

    fn validate_concat(&self) -> Result<Plan, Error> {
        let mut chk = Check::new(self);
        let variants = [
            self.horizon.is_some(),
            self.k_total.is_some(),
            self.k_ladder.is_some(),
        ];
        let set = variants.iter().filter(|v| **v).count();
        chk.constraint(
            set == 1,
            "concat mode requires exactly one of 'T' (continuous), 'k_total' (single chained run), 'k_ladder' (slope experiment)",
        );
        let kind = if self.horizon.is_some() {
            ConcatKind::Continuous {
                horizon: chk.require_f64("T", self.horizon),
            }
        } else if self.k_total.is_some() {
            let k_total = chk.require_usize("k_total", self.k_total);
            let s = chk.require_f64("s_per_l", self.s_per_l);
            chk.constraint(
                k_total >= 4 && k_total.is_multiple_of(2),
                "k_total must be an even number >= 4",
            );
            ConcatKind::SingleRun {
                k_total,
                s_per_l: s,
            }
        } else {
            chk.allow("k_ladder");
            let ladder = self.k_ladder.clone().unwrap_or_default();
            let s = chk.require_f64("s_per_l", self.s_per_l);
            chk.constraint(
                ladder.len() >= 2 && ladder.iter().all(|k| *k >= 4 && k.is_multiple_of(2)),
                "k_ladder needs at least two even budgets >= 4",
            );
            ConcatKind::SlopeLadder {
                k_ladder: ladder,
                s_per_l: s,
            }
        };
        chk.finish(Plan::Concat(kind))
    }

    fn validate_correspondence(&self) -> Result<Plan, Error> {
        let mut chk = Check::new(self);
        let horizon = chk.require_f64("T", self.horizon);
        chk.allow("k_ladder");
        let ladder = match &self.k_ladder {
            Some(l) => l.clone(),
            None => {
                chk.issues
                    .push("correspondence mode requires 'k_ladder'".into());
                Vec::new()
            }
        };
        let method = match self.method.as_deref() {
            Some("ogmg") => {
                chk.constraint(
                    ladder.iter().all(|k| k.is_multiple_of(16)),
                    "ogmg correspondence budgets must be multiples of 16 (checkpoint grid)",
                );
                CorrespondenceMethod::Ogmg
            }
            Some("oblg") => CorrespondenceMethod::Oblg,
            other => {
                chk.issues.push(format!(
                    "correspondence mode requires method 'ogmg' or 'oblg', got {other:?}"
                ));
                CorrespondenceMethod::Oblg
            }
        };
        chk.constraint(ladder.len() >= 2, "k_ladder needs at least two budgets");
        chk.finish(Plan::Correspondence {
            method,
            horizon,
            k_ladder: ladder,
        })
    }
}
