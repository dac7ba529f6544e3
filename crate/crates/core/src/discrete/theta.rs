//! Stepsize-weight sequences of the discrete methods.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaSource {
    /// θ_k = k/2 exactly.
    SsseHalfK,
    /// Backward recursion ending at 1: θ_K = 1,
    /// θ_i = (1 + √(1 + 4θ_{i+1}²))/2 for 1 ≤ i ≤ K−1,
    /// θ_0 = (1 + √(1 + 8θ_1²))/2. Values decrease with the index and grow
    /// by at least ½ per step backward.
    OgmgBackward,
    Custom,
}

#[derive(Clone, Debug)]
pub struct ThetaSchedule {
    values: Vec<f64>,
    source: ThetaSource,
}

impl ThetaSchedule {
    pub fn ssse(budget: usize) -> ThetaSchedule {
        ThetaSchedule {
            values: (0..=budget).map(|k| k as f64 / 2.0).collect(),
            source: ThetaSource::SsseHalfK,
        }
    }

    pub fn ogmg(budget: usize) -> Result<ThetaSchedule> {
        if budget < 1 {
            return Err(Error::InvalidParameter(
                "schedule needs a budget of at least 1".into(),
            ));
        }
        let mut values = vec![0.0_f64; budget + 1];
        values[budget] = 1.0;
        for i in (1..budget).rev() {
            let next = values[i + 1];
            values[i] = 0.5 * (1.0 + (1.0 + 4.0 * next * next).sqrt());
        }
        let first = values[1.min(budget)];
        values[0] = 0.5 * (1.0 + (1.0 + 8.0 * first * first).sqrt());
        Ok(ThetaSchedule {
            values,
            source: ThetaSource::OgmgBackward,
        })
    }

    pub fn custom(values: Vec<f64>) -> ThetaSchedule {
        ThetaSchedule {
            values,
            source: ThetaSource::Custom,
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> ThetaSource {
        self.source
    }

    /// For the backward schedule, the weight used at iteration k (with K−k
    /// iterations remaining) approaches (K−k)/2. Returns the worst relative
    /// deviation of values[k] from (K−k)/2 over 1 ≤ k ≤ upto. Index 0 is
    /// excluded: its 8-factor head term sits ≈√2 above the line by
    /// construction.
    pub fn worst_half_remaining_deviation(&self, upto: usize) -> f64 {
        let budget = self.values.len() - 1;
        (1..=upto.min(budget - 1))
            .map(|k| {
                let ideal = (budget - k) as f64 / 2.0;
                (self.values[k] - ideal).abs() / ideal
            })
            .fold(0.0, f64::max)
    }
}
