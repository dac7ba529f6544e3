//! Smooth convex test objectives with verified metadata and oracle self-checks.
//!
//! Every objective carries its smoothness constant `L`, a strong-convexity
//! constant `mu` (0 when merely convex), and, when known, the minimizer and
//! optimal value. Objectives are immutable after construction; metadata can
//! only be attached through the dedicated `with_minimizer` constructor
//! variant.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// Smooth convex oracle: f, ∇f, and verified metadata.
#[derive(Clone)]
pub struct Objective {
    dim: usize,
    f: ScalarFn,
    grad: VectorFn,
    lipschitz: f64,
    strong_convexity: f64,
    minimizer: Option<DVector<f64>>,
    f_star: Option<f64>,
    h1_gamma: Option<f64>,
    valid_radius: Option<f64>,
    label: String,
}

impl Objective {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        (self.f)(x)
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.grad)(x)
    }

    /// Lipschitz constant of the gradient (local bound inside
    /// `valid_radius` for objectives that are not globally smooth).
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }

    pub fn minimizer(&self) -> Option<&DVector<f64>> {
        self.minimizer.as_ref()
    }

    pub fn f_star(&self) -> Option<f64> {
        self.f_star
    }

    /// γ ≥ 1 such that f − f★ ≤ (1/γ)⟨∇f(x), x − X★⟩ holds, when declared.
    pub fn h1_gamma(&self) -> Option<f64> {
        self.h1_gamma
    }

    /// Radius on which the declared `L` is valid, for locally smooth families.
    pub fn valid_radius(&self) -> Option<f64> {
        self.valid_radius
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Attaches minimizer metadata post hoc. This is the only way to add
    /// metadata after construction; the oracle itself is never mutated.
    pub fn with_minimizer(self, minimizer: DVector<f64>, f_star: f64) -> Result<Objective> {
        if minimizer.len() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "minimizer dimension {} does not match objective dimension {}",
                minimizer.len(),
                self.dim
            )));
        }
        let at_min = (self.f)(&minimizer);
        if (at_min - f_star).abs() > 1e-12 * (1.0 + at_min.abs() + f_star.abs()) {
            return Err(Error::Metadata(format!(
                "declared f_star = {f_star} but f(minimizer) = {at_min}"
            )));
        }
        let grad_norm = (self.grad)(&minimizer).norm();
        if grad_norm > 1e-10 * self.lipschitz.max(1.0) {
            return Err(Error::Metadata(format!(
                "gradient norm {grad_norm} at declared minimizer is not negligible"
            )));
        }
        Ok(Objective {
            minimizer: Some(minimizer),
            f_star: Some(f_star),
            ..self
        })
    }

    /// Copy with minimizer metadata withheld. Used to exercise code paths
    /// that only assume f★ > −∞ without a known solution.
    pub fn without_optimum(&self) -> Objective {
        Objective {
            minimizer: None,
            f_star: None,
            ..self.clone()
        }
    }
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Objective")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("L", &self.lipschitz)
            .field("mu", &self.strong_convexity)
            .finish()
    }
}

/// Diagonal quadratic f(x) = ½ Σ λᵢ(xᵢ − cᵢ)² + offset.
pub fn make_quadratic(eigenvalues: &[f64], center: &[f64], offset: f64) -> Result<Objective> {
    if eigenvalues.is_empty() {
        return Err(Error::InvalidParameter(
            "quadratic needs at least one eigenvalue".into(),
        ));
    }
    if let Some(bad) = eigenvalues.iter().find(|l| **l <= 0.0 || !l.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "nonpositive eigenvalue {bad}"
        )));
    }
    if center.len() != eigenvalues.len() {
        return Err(Error::InvalidParameter(format!(
            "center dimension {} does not match eigenvalue count {}",
            center.len(),
            eigenvalues.len()
        )));
    }
    let lambda = DVector::from_column_slice(eigenvalues);
    let c = DVector::from_column_slice(center);
    let dim = lambda.len();
    let lipschitz = eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let mu = eigenvalues.iter().cloned().fold(f64::MAX, f64::min);

    let (lf, cf) = (lambda.clone(), c.clone());
    let f: ScalarFn = Arc::new(move |x: &DVector<f64>| {
        let mut acc = 0.0;
        for i in 0..lf.len() {
            let d = x[i] - cf[i];
            acc += 0.5 * lf[i] * d * d;
        }
        acc + offset
    });
    let (lg, cg) = (lambda, c.clone());
    let grad: VectorFn =
        Arc::new(move |x: &DVector<f64>| DVector::from_fn(lg.len(), |i, _| lg[i] * (x[i] - cg[i])));

    Ok(Objective {
        dim,
        f,
        grad,
        lipschitz,
        strong_convexity: mu,
        minimizer: Some(c),
        f_star: Some(offset),
        h1_gamma: Some(2.0),
        valid_radius: None,
        label: format!("quadratic(dim={dim})"),
    })
}

/// Smoothed max: f(x) = ρ·log Σᵢ exp((⟨aᵢ, x⟩ − bᵢ)/ρ), evaluated with a
/// max shift so the exponentials never overflow.
pub fn make_logsumexp(
    rows: DMatrix<f64>,
    rhs: DVector<f64>,
    temperature: f64,
) -> Result<Objective> {
    if rows.nrows() == 0 {
        return Err(Error::InvalidParameter(
            "logsumexp needs at least one row".into(),
        ));
    }
    if rhs.len() != rows.nrows() {
        return Err(Error::InvalidParameter(format!(
            "rhs length {} does not match row count {}",
            rhs.len(),
            rows.nrows()
        )));
    }
    if !(temperature > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let dim = rows.ncols();
    let sigma_max = rows.clone().singular_values()[0];
    let lipschitz = sigma_max * sigma_max / temperature;

    let margins = move |a: &DMatrix<f64>, b: &DVector<f64>, x: &DVector<f64>| -> DVector<f64> {
        let mut m = a * x;
        m -= b;
        m /= temperature;
        m
    };

    let (af, bf) = (rows.clone(), rhs.clone());
    let f: ScalarFn = Arc::new(move |x: &DVector<f64>| {
        let m = margins(&af, &bf, x);
        let shift = m.max();
        let sum: f64 = m.iter().map(|v| (v - shift).exp()).sum();
        temperature * (shift + sum.ln())
    });
    let (ag, bg) = (rows, rhs);
    let grad: VectorFn = Arc::new(move |x: &DVector<f64>| {
        let m = margins(&ag, &bg, x);
        let shift = m.max();
        let w = DVector::from_iterator(m.len(), m.iter().map(|v| (v - shift).exp()));
        let sum: f64 = w.sum();
        ag.transpose() * (w / sum)
    });

    Ok(Objective {
        dim,
        f,
        grad,
        lipschitz,
        strong_convexity: 0.0,
        minimizer: None,
        f_star: None,
        h1_gamma: None,
        valid_radius: None,
        label: format!("logsumexp(dim={dim})"),
    })
}

/// Power objective f(x) = ‖x‖^p for p ≥ 2, which satisfies the growth
/// hypothesis with equality: ⟨∇f(x), x⟩ = p·f(x). The gradient is only
/// locally Lipschitz for p > 2, so `L = p(p−1)R^{p−2}` is declared for a
/// validity radius R.
pub fn make_power(exponent: f64, dim: usize, radius: f64) -> Result<Objective> {
    if exponent < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "power exponent must be >= 2 (gradient not Lipschitz near 0), got {exponent}"
        )));
    }
    if dim == 0 || !(radius > 0.0) {
        return Err(Error::InvalidParameter(
            "power objective needs dim >= 1 and radius > 0".into(),
        ));
    }
    let p = exponent;
    let f: ScalarFn = Arc::new(move |x: &DVector<f64>| x.norm().powf(p));
    let grad: VectorFn = Arc::new(move |x: &DVector<f64>| {
        let n = x.norm();
        if n == 0.0 {
            DVector::zeros(x.len())
        } else {
            x * (p * n.powf(p - 2.0))
        }
    });

    Ok(Objective {
        dim,
        f,
        grad,
        lipschitz: p * (p - 1.0) * radius.powf(p - 2.0),
        strong_convexity: 0.0,
        minimizer: Some(DVector::zeros(dim)),
        f_star: Some(0.0),
        h1_gamma: Some(p),
        valid_radius: Some(radius),
        label: format!("power(p={p},dim={dim})"),
    })
}

/// f(x) − f(y) − ⟨∇f(y), x − y⟩, the nonnegative residual of the convexity
/// inequality and the integrand building block of the convexity-gap
/// integrals.
pub fn convexity_gap(obj: &Objective, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    obj.value(x) - obj.value(y) - obj.gradient(y).dot(&(x - y))
}

/// Max over coordinates of |central finite difference − gradient component|.
pub fn check_gradient(obj: &Objective, x: &DVector<f64>, h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let g = obj.gradient(x);
    let mut worst = 0.0_f64;
    for i in 0..obj.dim() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let fd = (obj.value(&xp) - obj.value(&xm)) / (2.0 * h);
        worst = worst.max((fd - g[i]).abs());
    }
    worst
}

/// Observed convergence order of `check_gradient` across a halving ladder of
/// steps: mean of log2(err(h)/err(h/2)).
pub fn gradient_check_order(obj: &Objective, x: &DVector<f64>, h0: f64, levels: usize) -> f64 {
    assert!(levels >= 2);
    let errs: Vec<f64> = (0..levels)
        .map(|i| check_gradient(obj, x, h0 / 2f64.powi(i as i32)))
        .collect();
    let mut acc = 0.0;
    for w in errs.windows(2) {
        acc += (w[0] / w[1]).log2();
    }
    acc / (levels - 1) as f64
}

/// An objective paired with a start point.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub objective: Objective,
    pub x0: DVector<f64>,
    pub label: String,
}

impl ProblemInstance {
    pub fn new(objective: Objective, x0: DVector<f64>, label: impl Into<String>) -> Result<Self> {
        if x0.len() != objective.dim() {
            return Err(Error::InvalidParameter(format!(
                "x0 dimension {} does not match objective dimension {}",
                x0.len(),
                objective.dim()
            )));
        }
        Ok(ProblemInstance {
            objective,
            x0,
            label: label.into(),
        })
    }

    /// ‖X₀ − X★‖², when the minimizer is known.
    pub fn initial_distance_sq(&self) -> Option<f64> {
        self.objective
            .minimizer()
            .map(|xs| (&self.x0 - xs).norm_squared())
    }

    /// f(X₀) − f★, when the optimal value is known.
    pub fn initial_gap(&self) -> Option<f64> {
        self.objective
            .f_star()
            .map(|fs| self.objective.value(&self.x0) - fs)
    }
}

/// Summary of the seeded sampling self-checks on an oracle.
#[derive(Clone, Debug)]
pub struct OracleReport {
    /// Worst convexity-inequality violation, normalized by 1 + |f(x)| + |f(y)|.
    pub convexity_worst: f64,
    /// Worst ratio ‖∇f(x) − ∇f(y)‖ / (L‖x − y‖) − 1 over sampled pairs.
    pub smoothness_worst: f64,
    /// Worst |⟨∇f(x), x − X★⟩ − γ(f(x) − f★)| / (1 + |f(x)|), for objectives
    /// declaring the growth hypothesis with equality (power family).
    pub h1_equality_worst: Option<f64>,
    pub pairs: usize,
}

/// Deterministic seeded sampling checks: convexity, smoothness, and (for the
/// power family) the growth-equality identity, on `pairs` random pairs drawn
/// inside the ball of the given radius (where the declared L is valid).
pub fn sample_oracle_checks(obj: &Objective, seed: u64, pairs: usize, radius: f64) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = obj.dim();
    let half_width = radius / (dim as f64).sqrt();
    let draw = |rng: &mut ChaCha8Rng| -> DVector<f64> {
        DVector::from_fn(dim, |_, _| rng.gen_range(-half_width..half_width))
    };
    let mut convexity_worst = 0.0_f64;
    let mut smoothness_worst = 0.0_f64;
    let mut h1_worst: Option<f64> = obj.h1_gamma().map(|_| 0.0);
    let check_h1 = obj.h1_gamma().is_some() && obj.label().starts_with("power");

    for _ in 0..pairs {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let gap = convexity_gap(obj, &x, &y);
        let scale = 1.0 + obj.value(&x).abs() + obj.value(&y).abs();
        convexity_worst = convexity_worst.max(-gap / scale);

        let dist = (&x - &y).norm();
        if dist > 0.0 {
            let ratio = (obj.gradient(&x) - obj.gradient(&y)).norm() / (obj.lipschitz() * dist);
            smoothness_worst = smoothness_worst.max(ratio - 1.0);
        }

        if check_h1 {
            let gamma = obj.h1_gamma().unwrap();
            let fs = obj.f_star().unwrap_or(0.0);
            let xs = obj
                .minimizer()
                .cloned()
                .unwrap_or_else(|| DVector::zeros(dim));
            let lhs = obj.gradient(&x).dot(&(&x - &xs));
            let rhs = gamma * (obj.value(&x) - fs);
            let resid = (lhs - rhs).abs() / (1.0 + obj.value(&x).abs());
            let w = h1_worst.get_or_insert(0.0);
            *w = w.max(resid);
        }
    }

    OracleReport {
        convexity_worst,
        smoothness_worst,
        h1_equality_worst: if check_h1 { h1_worst } else { None },
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec1(x: f64) -> DVector<f64> {
        DVector::from_column_slice(&[x])
    }

    #[test]
    fn quadratic_unit() {
        let q = make_quadratic(&[1.0], &[0.0], 0.0).unwrap();
        assert_eq!(q.value(&vec1(2.0)), 2.0);
        assert_eq!(q.gradient(&vec1(2.0))[0], 2.0);
        assert_eq!(q.lipschitz(), 1.0);
        assert_eq!(q.strong_convexity(), 1.0);
    }

    #[test]
    fn quadratic_two_eigenvalues() {
        let q = make_quadratic(&[1.0, 4.0], &[0.0, 0.0], 0.0).unwrap();
        assert_eq!(q.lipschitz(), 4.0);
        assert_eq!(q.strong_convexity(), 1.0);
        let g = q.gradient(&DVector::from_column_slice(&[1.0, 1.0]));
        assert_eq!((g[0], g[1]), (1.0, 4.0));
    }

    #[test]
    fn quadratic_shifted() {
        let q = make_quadratic(&[2.0], &[3.0], 5.0).unwrap();
        assert_eq!(q.minimizer().unwrap()[0], 3.0);
        assert_eq!(q.f_star().unwrap(), 5.0);
        assert_eq!(q.value(&vec1(4.0)), 6.0);
    }

    #[test]
    fn quadratic_rejects_nonpositive_eigenvalue() {
        assert!(matches!(
            make_quadratic(&[1.0, -2.0], &[0.0, 0.0], 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_quadratic(&[0.0], &[0.0], 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    fn symmetric_logsumexp_1d() -> Objective {
        let a = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        let b = DVector::from_column_slice(&[0.0, 0.0]);
        make_logsumexp(a, b, 1.0).unwrap()
    }

    #[test]
    fn logsumexp_symmetric_center() {
        let o = symmetric_logsumexp_1d();
        assert!((o.value(&vec1(0.0)) - 2f64.ln()).abs() < 1e-15);
        // symmetry forces grad(0) = 0; closed form is tanh(x)
        assert!(o.gradient(&vec1(0.0))[0].abs() < 1e-15);
        assert!((o.gradient(&vec1(1.0))[0] - 1f64.tanh()).abs() < 1e-14);
        // attach the metadata the symmetry argument justifies
        let o = o.with_minimizer(vec1(0.0), 2f64.ln()).unwrap();
        assert_eq!(o.f_star().unwrap(), 2f64.ln());
    }

    #[test]
    fn logsumexp_affine_degenerate_row() {
        let a = DMatrix::from_row_slice(1, 1, &[1.0]);
        let b = DVector::from_column_slice(&[0.0]);
        let o = make_logsumexp(a, b, 1.0).unwrap();
        // single row is affine: f(x) = x, and the L bound is still valid
        assert!((o.value(&vec1(3.0)) - 3.0).abs() < 1e-15);
        assert!((o.lipschitz() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn logsumexp_rejects_bad_temperature() {
        let a = DMatrix::from_row_slice(1, 1, &[1.0]);
        let b = DVector::from_column_slice(&[0.0]);
        assert!(matches!(
            make_logsumexp(a, b, 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn logsumexp_no_overflow_far_from_origin() {
        let o = symmetric_logsumexp_1d();
        let v = o.value(&vec1(2000.0));
        assert!(v.is_finite() && (v - 2000.0).abs() < 1e-9);
    }

    #[test]
    fn power_quadratic_case() {
        let o = make_power(2.0, 2, 10.0).unwrap();
        let x = DVector::from_column_slice(&[3.0, 4.0]);
        assert!((o.value(&x) - 25.0).abs() < 1e-12);
        let g = o.gradient(&x);
        assert!((g[0] - 6.0).abs() < 1e-12 && (g[1] - 8.0).abs() < 1e-12);
        assert!((g.dot(&x) - 2.0 * o.value(&x)).abs() < 1e-12);
    }

    #[test]
    fn power_growth_equality() {
        let o = make_power(4.0, 1, 10.0).unwrap();
        let x = vec1(1.0);
        assert!((o.value(&x) - 1.0).abs() < 1e-15);
        assert!((o.gradient(&x)[0] - 4.0).abs() < 1e-15);
        // growth residual f − f★ − (1/γ)⟨∇f, x − 0⟩ vanishes identically
        let resid = o.value(&x) - 0.0 - o.gradient(&x).dot(&x) / 4.0;
        assert!(resid.abs() < 1e-15);
    }

    #[test]
    fn power_gradient_at_origin() {
        let o = make_power(3.0, 2, 10.0).unwrap();
        let x = DVector::zeros(2);
        assert_eq!(o.value(&x), 0.0);
        assert_eq!(o.gradient(&x).norm(), 0.0);
    }

    #[test]
    fn power_rejects_small_exponent() {
        assert!(matches!(
            make_power(1.5, 1, 10.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn convexity_gap_values() {
        let q = make_quadratic(&[1.0], &[0.0], 0.0).unwrap();
        assert!((convexity_gap(&q, &vec1(2.0), &vec1(0.0)) - 2.0).abs() < 1e-15);
        assert!(convexity_gap(&q, &vec1(1.3), &vec1(1.3)).abs() < 1e-15);
        assert!((convexity_gap(&q, &vec1(0.0), &vec1(1.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gradient_check_quadratic_is_exact() {
        let q = make_quadratic(&[1.0], &[0.0], 0.0).unwrap();
        assert!(check_gradient(&q, &vec1(1.0), 1e-4) <= 1e-9);
    }

    #[test]
    fn gradient_check_smooth_families() {
        let o = symmetric_logsumexp_1d();
        assert!(check_gradient(&o, &vec1(0.0), 1e-4) <= 1e-7);
        let p = make_power(4.0, 1, 10.0).unwrap();
        assert!(check_gradient(&p, &vec1(1.0), 1e-5) <= 1e-8);
    }

    #[test]
    fn gradient_check_second_order() {
        let o = symmetric_logsumexp_1d();
        assert!(gradient_check_order(&o, &vec1(0.7), 1e-2, 4) >= 1.9);
        let p = make_power(4.0, 2, 10.0).unwrap();
        let x = DVector::from_column_slice(&[0.8, -0.3]);
        assert!(gradient_check_order(&p, &x, 1e-2, 4) >= 1.9);
    }

    #[test]
    fn seeded_oracle_checks_pass() {
        for obj in [
            make_quadratic(&[1.0, 4.0], &[0.5, -0.5], 1.0).unwrap(),
            symmetric_logsumexp_1d(),
            make_power(4.0, 2, 10.0).unwrap(),
        ] {
            let radius = obj.valid_radius().unwrap_or(5.0);
            let rep = sample_oracle_checks(&obj, 42, 1000, radius);
            assert!(rep.convexity_worst <= 1e-12, "{}", obj.label());
            assert!(rep.smoothness_worst <= 1e-10, "{}", obj.label());
            if let Some(h1) = rep.h1_equality_worst {
                assert!(h1 <= 1e-12);
            }
        }
    }

    #[test]
    fn oracle_checks_reproduce_exactly() {
        let o = make_quadratic(&[1.0, 4.0], &[0.0, 0.0], 0.0).unwrap();
        let a = sample_oracle_checks(&o, 7, 100, 3.0);
        let b = sample_oracle_checks(&o, 7, 100, 3.0);
        assert_eq!(a.convexity_worst.to_bits(), b.convexity_worst.to_bits());
        assert_eq!(a.smoothness_worst.to_bits(), b.smoothness_worst.to_bits());
    }

    #[test]
    fn with_minimizer_validates() {
        let o = symmetric_logsumexp_1d();
        assert!(o.clone().with_minimizer(vec1(0.5), 0.9).is_err());
        assert!(o.with_minimizer(vec1(0.0), 2f64.ln()).is_ok());
    }

    #[test]
    fn instance_dimension_checked() {
        let o = make_quadratic(&[1.0, 2.0], &[0.0, 0.0], 0.0).unwrap();
        assert!(ProblemInstance::new(o.clone(), vec1(1.0), "bad").is_err());
        let p = ProblemInstance::new(o, DVector::from_column_slice(&[1.0, 0.0]), "ok").unwrap();
        assert_eq!(p.initial_distance_sq().unwrap(), 1.0);
    }
}
