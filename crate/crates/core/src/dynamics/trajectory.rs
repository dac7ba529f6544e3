//! Dense time-indexed trajectory samples with co-integrated accumulator
//! channels and cubic-Hermite dense output.

use nalgebra::DVector;

use super::dopri5::SampledSolution;
use super::{AccumulatorSpec, OdeFamily};
use crate::error::{Error, Result};

/// One stored sample: position, velocity, and (for second-order families)
/// the acceleration, which feeds the Hermite interpolant of the velocity.
#[derive(Clone, Debug)]
pub struct State {
    pub x: DVector<f64>,
    pub v: DVector<f64>,
    pub a: Option<DVector<f64>>,
}

struct Channel {
    spec: AccumulatorSpec,
    values: Vec<f64>,
}

/// Immutable dense trajectory of one (family, problem) integration.
pub struct Trajectory {
    family: OdeFamily,
    problem_label: String,
    times: Vec<f64>,
    states: Vec<State>,
    channels: Vec<Channel>,
}

impl Trajectory {
    pub(super) fn from_flat_solution(
        family: OdeFamily,
        problem_label: String,
        sol: SampledSolution,
        n: usize,
        specs: Vec<AccumulatorSpec>,
    ) -> Trajectory {
        let second_order = family.is_second_order();
        let m = specs.len();
        let mut states = Vec::with_capacity(sol.times.len());
        let mut channel_values: Vec<Vec<f64>> = vec![Vec::with_capacity(sol.times.len()); m];

        for (y, dy) in sol.states.iter().zip(&sol.derivs) {
            let x = DVector::from(y.rows(0, n));
            if second_order {
                states.push(State {
                    x,
                    v: DVector::from(y.rows(n, n)),
                    a: Some(DVector::from(dy.rows(n, n))),
                });
            } else {
                // first-order flow: V := Ẋ = −∇f(X), read off the derivative
                states.push(State {
                    x,
                    v: DVector::from(dy.rows(0, n)),
                    a: None,
                });
            }
            let base = if second_order { 2 * n } else { n };
            for (j, col) in channel_values.iter_mut().enumerate() {
                col.push(y[base + j]);
            }
        }

        let channels = specs
            .into_iter()
            .zip(channel_values)
            .map(|(spec, values)| Channel { spec, values })
            .collect();

        Trajectory {
            family,
            problem_label,
            times: sol.times,
            states,
            channels,
        }
    }

    pub fn family(&self) -> OdeFamily {
        self.family
    }

    pub fn problem_label(&self) -> &str {
        &self.problem_label
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn channel_names(&self) -> Vec<&str> {
        self.channels.iter().map(|c| c.spec.name.as_str()).collect()
    }

    pub fn channel_values(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|c| c.spec.name == name)
            .map(|c| c.values.as_slice())
    }

    fn locate(&self, t: f64) -> Result<usize> {
        let (lo, hi) = (self.start_time(), self.end_time());
        if !(t >= lo && t <= hi) {
            return Err(Error::Range {
                what: "dense evaluation time".into(),
                value: t,
                lo,
                hi,
            });
        }
        // index of the interval [t_i, t_{i+1}] containing t
        let i = match self
            .times
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            Ok(i) => i.min(self.times.len() - 2),
            Err(i) => i - 1,
        };
        Ok(i.min(self.times.len() - 2))
    }

    /// Cubic-Hermite interpolated (X(t), Ẋ(t)); exact at stored nodes.
    pub fn dense_eval(&self, t: f64) -> Result<(DVector<f64>, DVector<f64>)> {
        let i = self.locate(t)?;
        if t == self.times[i] {
            let s = &self.states[i];
            return Ok((s.x.clone(), s.v.clone()));
        }
        if t == self.times[i + 1] {
            let s = &self.states[i + 1];
            return Ok((s.x.clone(), s.v.clone()));
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let dt = t1 - t0;
        let s = (t - t0) / dt;
        let (a, b) = (&self.states[i], &self.states[i + 1]);

        let x = hermite(s, dt, &a.x, &a.v, &b.x, &b.v);
        let v = match (&a.a, &b.a) {
            (Some(aa), Some(ba)) => hermite(s, dt, &a.v, aa, &b.v, ba),
            // first-order flow: differentiate the position interpolant
            _ => hermite_derivative(s, dt, &a.x, &a.v, &b.x, &b.v),
        };
        Ok((x, v))
    }

    /// Accumulator value at `t`, Hermite-interpolated using the integrand as
    /// the channel's slope; exact at stored nodes.
    pub fn channel_eval(&self, name: &str, t: f64) -> Result<f64> {
        let ch = self
            .channels
            .iter()
            .find(|c| c.spec.name == name)
            .ok_or_else(|| {
                Error::Configuration(format!("accumulator channel '{name}' not registered"))
            })?;
        let i = self.locate(t)?;
        if t == self.times[i] {
            return Ok(ch.values[i]);
        }
        if t == self.times[i + 1] {
            return Ok(ch.values[i + 1]);
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let dt = t1 - t0;
        let s = (t - t0) / dt;
        let (sa, sb) = (&self.states[i], &self.states[i + 1]);
        let g0 = (ch.spec.integrand)(t0, &sa.x, &sa.v);
        let g1 = (ch.spec.integrand)(t1, &sb.x, &sb.v);
        let (h00, h10, h01, h11) = hermite_basis(s);
        Ok(h00 * ch.values[i] + h10 * dt * g0 + h01 * ch.values[i + 1] + h11 * dt * g1)
    }

    /// CSV serialization: `t, x_0..x_{n-1}, v_0..v_{n-1}, <channel names>`,
    /// floats written with 17 significant digits.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let n = self.states[0].x.len();
        let mut out = String::new();
        out.push('t');
        for i in 0..n {
            let _ = write!(out, ",x_{i}");
        }
        for i in 0..n {
            let _ = write!(out, ",v_{i}");
        }
        for c in &self.channels {
            let _ = write!(out, ",{}", c.spec.name);
        }
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            let _ = write!(out, "{t:.16e}");
            let st = &self.states[k];
            for i in 0..n {
                let _ = write!(out, ",{:.16e}", st.x[i]);
            }
            for i in 0..n {
                let _ = write!(out, ",{:.16e}", st.v[i]);
            }
            for c in &self.channels {
                let _ = write!(out, ",{:.16e}", c.values[k]);
            }
            out.push('\n');
        }
        out
    }
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

fn hermite(
    s: f64,
    dt: f64,
    y0: &DVector<f64>,
    d0: &DVector<f64>,
    y1: &DVector<f64>,
    d1: &DVector<f64>,
) -> DVector<f64> {
    let (h00, h10, h01, h11) = hermite_basis(s);
    y0 * h00 + d0 * (h10 * dt) + y1 * h01 + d1 * (h11 * dt)
}

fn hermite_derivative(
    s: f64,
    dt: f64,
    y0: &DVector<f64>,
    d0: &DVector<f64>,
    y1: &DVector<f64>,
    d1: &DVector<f64>,
) -> DVector<f64> {
    let s2 = s * s;
    let g00 = (6.0 * s2 - 6.0 * s) / dt;
    let g10 = 3.0 * s2 - 4.0 * s + 1.0;
    let g01 = (-6.0 * s2 + 6.0 * s) / dt;
    let g11 = 3.0 * s2 - 2.0 * s;
    y0 * g00 + d0 * g10 + y1 * g01 + d1 * g11
}
