//! Embedded Dormand–Prince 5(4) stepper on flat state vectors.
//!
//! Steps are clamped so every requested sample time is hit exactly; stored
//! samples are therefore true integration points, accurate to the local
//! error tolerances.

use nalgebra::DVector;

use crate::error::{Error, Result};

const STAGES: usize = 7;

// Dormand & Prince (1980) RK5(4)7M tableau. The 5th-order weights equal the
// last A row (FSAL).
const C: [f64; STAGES] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; STAGES] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; STAGES] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub struct StepperOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

/// Solution recorded at the requested sample times: states and the exact
/// derivative f(t, y) evaluated there.
#[derive(Debug)]
pub struct SampledSolution {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub derivs: Vec<DVector<f64>>,
}

/// Integrate dy/dt = rhs(t, y) from `samples[0]` to `samples.last()`,
/// recording the state at every sample time. `samples` must be strictly
/// increasing.
pub fn integrate_sampled(
    rhs: &dyn Fn(f64, &DVector<f64>) -> DVector<f64>,
    y0: DVector<f64>,
    samples: &[f64],
    opts: &StepperOptions,
) -> Result<SampledSolution> {
    assert!(samples.len() >= 2, "need at least two sample times");
    assert!(
        samples.windows(2).all(|w| w[1] > w[0]),
        "sample times must be strictly increasing"
    );

    let mut t = samples[0];
    let mut y = y0;
    let mut k1 = eval(rhs, t, &y)?;

    let span = samples[samples.len() - 1] - t;
    let grid = span / (samples.len() - 1) as f64;
    let mut h = (grid / 8.0).min(opts.max_step);

    let mut out = SampledSolution {
        times: Vec::with_capacity(samples.len()),
        states: Vec::with_capacity(samples.len()),
        derivs: Vec::with_capacity(samples.len()),
    };
    out.times.push(t);
    out.states.push(y.clone());
    out.derivs.push(k1.clone());

    let mut next_sample = 1;
    let mut rejects_in_a_row = 0usize;
    let mut k = vec![DVector::zeros(y.len()); STAGES];

    while next_sample < samples.len() {
        let target = samples[next_sample];
        let clamped = h.min(opts.max_step) >= target - t;
        let h_try = h.min(opts.max_step).min(target - t);
        if h_try < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration {
                last_t: t,
                reason: "step size underflow".into(),
            });
        }

        k[0] = k1.clone();
        for i in 1..STAGES {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate().take(i) {
                if A[i][j] != 0.0 {
                    yi.axpy(h_try * A[i][j], kj, 1.0);
                }
            }
            k[i] = eval(rhs, t + C[i] * h_try, &yi)?;
        }

        let mut y5 = y.clone();
        let mut err = DVector::zeros(y.len());
        for i in 0..STAGES {
            if B5[i] != 0.0 {
                y5.axpy(h_try * B5[i], &k[i], 1.0);
            }
            let d = B5[i] - B4[i];
            if d != 0.0 {
                err.axpy(h_try * d, &k[i], 1.0);
            }
        }

        let mut err_norm = 0.0_f64;
        for i in 0..y.len() {
            let tol = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            err_norm = err_norm.max((err[i] / tol).abs());
        }

        if err_norm <= 1.0 {
            rejects_in_a_row = 0;
            t += h_try;
            // FSAL: the last stage is the derivative at the accepted point
            k1 = k[STAGES - 1].clone();
            y = y5;
            if (t - target).abs() <= 1e-12 * target.abs().max(1.0) {
                t = target;
                out.times.push(t);
                out.states.push(y.clone());
                out.derivs.push(k1.clone());
                next_sample += 1;
            }
        } else {
            rejects_in_a_row += 1;
            if rejects_in_a_row > 60 {
                return Err(Error::Integration {
                    last_t: t,
                    reason: "too many consecutive step rejections".into(),
                });
            }
        }

        let scale = (0.9 * err_norm.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        // keep the adaptive step when this step was only shortened to land
        // on a sample time, so output density does not throttle the stepper
        if err_norm > 1.0 || !clamped {
            h = (h_try * scale).min(opts.max_step);
        }
    }

    Ok(out)
}

fn eval(
    rhs: &dyn Fn(f64, &DVector<f64>) -> DVector<f64>,
    t: f64,
    y: &DVector<f64>,
) -> Result<DVector<f64>> {
    let dy = rhs(t, y);
    if dy.iter().any(|v| !v.is_finite()) {
        return Err(Error::OracleFailure(t));
    }
    Ok(dy)
}
