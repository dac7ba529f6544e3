//! Numeric certificates: conservation, monotone nonincrease, and bound
//! satisfaction, each with an explicit worst violation and tolerance.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Conservation,
    MonotoneNonincreasing,
    BoundHolds,
}

/// Outcome of one certified property over a sampled series.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub id: String,
    pub kind: CertificateKind,
    /// (t, value) samples the check ran over; trimmed in summary output.
    #[serde(skip)]
    pub series: Vec<(f64, f64)>,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Certificate {
    fn new(
        id: String,
        kind: CertificateKind,
        series: Vec<(f64, f64)>,
        worst_violation: f64,
        tolerance: f64,
    ) -> Certificate {
        Certificate {
            id,
            kind,
            series,
            worst_violation,
            tolerance,
            pass: worst_violation <= tolerance,
        }
    }
}

/// Constancy of a series: worst |v(t) − v(t_ref)| normalized by
/// max(1, |v(t_ref)|), where t_ref is the first sample.
pub fn conservation_certificate(
    id: impl Into<String>,
    series: Vec<(f64, f64)>,
    tolerance: f64,
) -> Certificate {
    let reference = series.first().map(|(_, v)| *v).unwrap_or(0.0);
    let denom = reference.abs().max(1.0);
    let worst = series
        .iter()
        .map(|(_, v)| (v - reference).abs() / denom)
        .fold(0.0, f64::max);
    Certificate::new(
        id.into(),
        CertificateKind::Conservation,
        series,
        worst,
        tolerance,
    )
}

/// Nonincrease with absolute slack: v(t₂) ≤ v(t₁) + slack for every pair
/// t₁ < t₂, checked via the running minimum.
pub fn monotone_certificate(
    id: impl Into<String>,
    series: Vec<(f64, f64)>,
    slack: f64,
) -> Certificate {
    let mut running_min = f64::INFINITY;
    let mut worst = 0.0_f64;
    for (_, v) in &series {
        if running_min.is_finite() {
            // f64::max ignores NaN differences, so a NaN entry neither
            // passes nor hides an earlier recorded violation
            worst = worst.max(v - running_min);
        }
        running_min = running_min.min(*v);
    }
    Certificate::new(
        id.into(),
        CertificateKind::MonotoneNonincreasing,
        series,
        worst,
        slack,
    )
}

/// measured(t) ≤ bound(t)·(1 + rel_slack) at every checkpoint; the worst
/// violation is reported relative to the bound.
pub fn bound_certificate(
    id: impl Into<String>,
    measured: &[(f64, f64)],
    bound: impl Fn(f64) -> f64,
    rel_slack: f64,
) -> Certificate {
    let mut worst = 0.0_f64;
    let mut series = Vec::with_capacity(measured.len());
    for &(t, m) in measured {
        let b = bound(t);
        series.push((t, m - b));
        worst = worst.max((m - b) / b.abs().max(f64::MIN_POSITIVE));
    }
    Certificate::new(
        id.into(),
        CertificateKind::BoundHolds,
        series,
        worst,
        rel_slack,
    )
}
