//! Problem catalog: string keys to problem instances.
//!
//! Keys:
//!   quadratic:SPEC     diagonal quadratic; SPEC is a comma list of positive
//!                      eigenvalues with an optional xN tile suffix, e.g.
//!                      "quadratic:1,4" or "quadratic:1,4x5" (dim 10).
//!                      Center 0, optimal value 0, default start (1..1)/√n.
//!   logsumexp:sym1d    symmetric two-sided softmax in 1-D; minimizer 0 and
//!                      f★ = ln 2 attached. Default start 1.
//!   logsumexp:sym2d    coordinate-symmetric softmax in 2-D; minimizer 0 and
//!                      f★ = ln 4 attached. Default start (1,1)/√2.
//!   power:P            f(x) = ‖x‖^P in 1-D (P ≥ 2), validity radius 10.
//!                      Default start 1.

use agdlab::error::{Error, Result};
use agdlab::problems::{make_logsumexp, make_power, make_quadratic, ProblemInstance};
use nalgebra::{DMatrix, DVector};

pub const CATALOG_HELP: &[(&str, &str)] = &[
    (
        "quadratic:SPEC",
        "diagonal quadratic, SPEC = eigenvalues with optional xN tile (e.g. 1,4x5); x0 = ones/sqrt(n)",
    ),
    ("logsumexp:sym1d", "symmetric softmax in 1-D, f* = ln 2; x0 = 1"),
    ("logsumexp:sym2d", "coordinate-symmetric softmax in 2-D, f* = ln 4; x0 = ones/sqrt(2)"),
    ("power:P", "f = |x|^P in 1-D with validity radius 10; x0 = 1"),
];

pub fn build_problem(key: &str, x0_override: Option<&[f64]>) -> Result<ProblemInstance> {
    let (family, spec) = key.split_once(':').ok_or_else(|| {
        Error::Configuration(format!("problem key '{key}' has no ':<spec>' part"))
    })?;

    let (objective, default_x0) = match family {
        "quadratic" => {
            let eigs = parse_eigenvalues(spec)?;
            let n = eigs.len();
            let obj = make_quadratic(&eigs, &vec![0.0; n], 0.0)?;
            let x0 = DVector::from_element(n, 1.0 / (n as f64).sqrt());
            (obj, x0)
        }
        "logsumexp" => match spec {
            "sym1d" => {
                let a = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
                let obj = make_logsumexp(a, DVector::zeros(2), 1.0)?
                    .with_minimizer(DVector::zeros(1), 2f64.ln())?;
                (obj, DVector::from_column_slice(&[1.0]))
            }
            "sym2d" => {
                let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]);
                let obj = make_logsumexp(a, DVector::zeros(4), 1.0)?
                    .with_minimizer(DVector::zeros(2), 4f64.ln())?;
                (obj, DVector::from_element(2, 1.0 / 2f64.sqrt()))
            }
            other => {
                return Err(Error::Configuration(format!(
                    "unknown logsumexp variant '{other}' (expected sym1d or sym2d)"
                )))
            }
        },
        "power" => {
            let p: f64 = spec.parse().map_err(|_| {
                Error::Configuration(format!("power exponent '{spec}' is not a number"))
            })?;
            let obj = make_power(p, 1, 10.0)?;
            (obj, DVector::from_column_slice(&[1.0]))
        }
        other => {
            return Err(Error::Configuration(format!(
                "unknown problem family '{other}'; see `labcli list-problems`"
            )))
        }
    };

    let x0 = match x0_override {
        Some(v) => DVector::from_column_slice(v),
        None => default_x0,
    };
    ProblemInstance::new(objective, x0, key)
}

fn parse_eigenvalues(spec: &str) -> Result<Vec<f64>> {
    let (list, tile) = match spec.split_once('x') {
        Some((l, t)) => {
            let tile: usize = t
                .parse()
                .map_err(|_| Error::Configuration(format!("tile count '{t}' is not an integer")))?;
            (l, tile)
        }
        None => (spec, 1),
    };
    if tile == 0 {
        return Err(Error::Configuration("tile count must be positive".into()));
    }
    let base: Vec<f64> = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Configuration(format!("eigenvalue '{s}' is not a number")))
        })
        .collect::<Result<_>>()?;
    if base.is_empty() {
        return Err(Error::Configuration("eigenvalue list is empty".into()));
    }
    Ok(base
        .iter()
        .cycle()
        .take(base.len() * tile)
        .cloned()
        .collect())
}
