//! Dilated coordinate transforms W = e^{γ(t)}(X − X_c) and the conjugate
//! momentum of the canonical vanishing-damping flow.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Time-dependent scaling of the dilated frame.
#[derive(Clone, Debug, PartialEq)]
pub enum FrameScaling {
    /// W = t^α (X − X_c)
    Power { alpha: f64 },
    /// W = (T − t)^α (X − X_c)
    PowerTerminal { alpha: f64, horizon: f64 },
    /// W = e^{βt} (X − X_c)
    Exponential { rate: f64 },
}

/// A dilated coordinate frame: scaling plus center point.
#[derive(Clone, Debug)]
pub struct DilatedFrame {
    pub scaling: FrameScaling,
    pub center: DVector<f64>,
}

impl DilatedFrame {
    pub fn power(alpha: f64, center: DVector<f64>) -> Self {
        DilatedFrame {
            scaling: FrameScaling::Power { alpha },
            center,
        }
    }

    pub fn power_terminal(alpha: f64, horizon: f64, center: DVector<f64>) -> Self {
        DilatedFrame {
            scaling: FrameScaling::PowerTerminal { alpha, horizon },
            center,
        }
    }

    pub fn exponential(rate: f64, center: DVector<f64>) -> Self {
        DilatedFrame {
            scaling: FrameScaling::Exponential { rate },
            center,
        }
    }

    /// Scale factor e^{γ(t)} and its derivative γ̇(t)·e^{γ(t)}.
    fn scale_and_rate(&self, t: f64) -> Result<(f64, f64)> {
        match &self.scaling {
            FrameScaling::Power { alpha } => {
                if t <= 0.0 && *alpha != 0.0 {
                    return Err(Error::Range {
                        what: "power frame time".into(),
                        value: t,
                        lo: f64::MIN_POSITIVE,
                        hi: f64::INFINITY,
                    });
                }
                Ok((t.powf(*alpha), alpha * t.powf(alpha - 1.0)))
            }
            FrameScaling::PowerTerminal { alpha, horizon } => {
                let tau = horizon - t;
                if tau <= 0.0 && *alpha != 0.0 {
                    return Err(Error::Range {
                        what: "terminal frame time".into(),
                        value: t,
                        lo: f64::NEG_INFINITY,
                        hi: *horizon,
                    });
                }
                // sign flips when differentiating (T − t)^α
                Ok((tau.powf(*alpha), -alpha * tau.powf(alpha - 1.0)))
            }
            FrameScaling::Exponential { rate } => {
                let e = (rate * t).exp();
                Ok((e, rate * e))
            }
        }
    }
}

/// Map (X, Ẋ) at time t into the dilated frame: (W, Ẇ).
pub fn to_dilated(
    frame: &DilatedFrame,
    t: f64,
    x: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let (scale, rate) = frame.scale_and_rate(t)?;
    let dx = x - &frame.center;
    let w = &dx * scale;
    let wdot = v * scale + dx * rate;
    Ok((w, wdot))
}

/// Exact inverse of [`to_dilated`].
pub fn from_dilated(
    frame: &DilatedFrame,
    t: f64,
    w: &DVector<f64>,
    wdot: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let (scale, rate) = frame.scale_and_rate(t)?;
    if scale == 0.0 {
        return Err(Error::Range {
            what: "frame scale".into(),
            value: t,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        });
    }
    let dx = w / scale;
    let x = &dx + &frame.center;
    let v = (wdot - &dx * rate) / scale;
    Ok((x, v))
}

/// Conjugate momentum P = Ẇ/t = tẊ + 2(X − X★) of the dilated frame
/// W = t²(X − X★).
pub fn conjugate_momentum(
    t: f64,
    x: &DVector<f64>,
    v: &DVector<f64>,
    x_star: &DVector<f64>,
) -> DVector<f64> {
    v * t + (x - x_star) * 2.0
}
