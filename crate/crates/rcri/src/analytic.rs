//! Closed forms for the relative cumulative residual information measure,
//! its generating-function diagonal, the proportional-hazards identities,
//! the first-order perturbation approximation and the sum upper bound.

use crate::distributions::{DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::numerics::central_difference;
use crate::quadrature::{drcri_quadrature, integrate_survival_product, SurvivalCurve};
use crate::special::ln_gamma;

/// Exponents and truncation age for a measure evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureParams {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub t: f64,
}

impl MeasureParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self {
            alpha,
            beta,
            theta: 1.0,
            t: 0.0,
        }
        .validated()
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        self.theta = theta;
        self.validated()
    }

    pub fn with_t(mut self, t: f64) -> Result<Self> {
        self.t = t;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidParameter("alpha must be > 0".into()));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::InvalidParameter("beta must be > 0".into()));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(Error::InvalidParameter("theta must be > 0".into()));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::InvalidParameter("t must be >= 0".into()));
        }
        Ok(self)
    }

    /// The combined survival power s = α + βθ.
    pub fn order(&self) -> f64 {
        self.alpha + self.beta * self.theta
    }
}

/// ∫ survival(x)^s dx in closed form for the supported families.
fn closed_form_power(spec: &DistributionSpec, s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidParameter("survival power must be > 0".into()));
    }
    match *spec.family() {
        Family::Uniform { a } => Ok(a / (s + 1.0)),
        Family::Exponential { rate } => Ok(1.0 / (rate * s)),
        Family::Weibull { rate, shape } => {
            // log-space keeps large s away from pow underflow
            let ln = ln_gamma(1.0 / shape) - (rate * shape).ln() - s.ln() / shape;
            Ok(ln.exp())
        }
        Family::Gpd { shape, scale } => {
            let denom = (shape + 1.0) * s - shape;
            if denom <= 0.0 {
                return Err(Error::DivergentIntegral(format!(
                    "gpd power integral needs (shape+1)s - shape > 0, got {denom}"
                )));
            }
            Ok(scale / denom)
        }
        Family::ParetoI { scale, shape } => {
            let denom = shape * s - 1.0;
            if denom <= 0.0 {
                return Err(Error::DivergentIntegral(format!(
                    "pareto1 power integral needs shape*s > 1, got shape*s = {}",
                    shape * s
                )));
            }
            Ok(scale / denom)
        }
        Family::ParetoII { scale, shape } => {
            let denom = shape * s - 1.0;
            if denom <= 0.0 {
                return Err(Error::DivergentIntegral(format!(
                    "pareto2 power integral needs shape*s > 1, got shape*s = {}",
                    shape * s
                )));
            }
            Ok(scale / denom)
        }
        Family::Lognormal { .. } => Err(Error::NoClosedForm {
            family: "lognormal".into(),
            hint: "no closed survival-power integral; use the quadrature route".into(),
        }),
    }
}

/// Cumulative residual entropy generating function: ∫ survival^order dx.
pub fn cregf(spec: &DistributionSpec, order: f64) -> Result<f64> {
    closed_form_power(spec, order)
}

/// `cregf` with a quadrature fallback for families without a closed form.
pub fn cregf_value(spec: &DistributionSpec, order: f64) -> Result<f64> {
    match closed_form_power(spec, order) {
        Err(Error::NoClosedForm { .. }) => {
            let s = SurvivalCurve::from_spec(spec);
            let half = 0.5 * order;
            let (v, _) = integrate_survival_product(&s, &s, half, half, 0.0)?;
            Ok(v)
        }
        other => other,
    }
}

/// The measure between survival and its θ-power under proportional hazards,
/// evaluated from the single-family closed form with s = α + βθ.
pub fn rcri_ph_closed_form(spec: &DistributionSpec, p: &MeasureParams) -> Result<f64> {
    closed_form_power(spec, p.order())
}

/// Exact value of the measure between two exponentials: 1/(αλ1 + βλ2).
pub fn rcri_two_exponentials(l1: f64, l2: f64, alpha: f64, beta: f64) -> Result<f64> {
    for (name, v) in [
        ("lambda1", l1),
        ("lambda2", l2),
        ("alpha", alpha),
        ("beta", beta),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be > 0")));
        }
    }
    Ok(1.0 / (alpha * l1 + beta * l2))
}

/// Quadrature of ∫ Sx^α Sy^β over [max of support infima, ∞).
pub fn rcri_quadrature(
    spec_x: &DistributionSpec,
    spec_y: &DistributionSpec,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let sx = SurvivalCurve::from_spec(spec_x);
    let sy = SurvivalCurve::from_spec(spec_y);
    let (v, _) = integrate_survival_product(&sx, &sy, alpha, beta, 0.0)?;
    Ok(v)
}

/// Closed-form age-t residual measure for the pairs that admit one:
/// two exponentials (constant in t) and a generalized Pareto with its
/// proportional-hazards power (linear in t).
pub fn drcri_closed_form(
    spec_x: &DistributionSpec,
    spec_y: &DistributionSpec,
    p: &MeasureParams,
) -> Result<f64> {
    if spec_x.survival(p.t) <= 0.0 || spec_y.survival(p.t) <= 0.0 {
        return Err(Error::Domain(format!(
            "residual measure undefined at t = {}: survival is zero there",
            p.t
        )));
    }
    match (*spec_x.family(), *spec_y.family()) {
        (Family::Exponential { rate: l1 }, Family::Exponential { rate: l2 }) => {
            rcri_two_exponentials(l1, l2, p.alpha, p.beta)
        }
        (Family::Gpd { shape, scale }, Family::Gpd { .. }) => {
            let expected = spec_x
                .ph_power(p.theta)
                .ok_or_else(|| Error::NoClosedForm {
                    family: "gpd".into(),
                    hint: format!("theta = {} leaves the generalized Pareto family", p.theta),
                })?;
            if !specs_close(&expected, spec_y) {
                return Err(Error::NoClosedForm {
                    family: "gpd pair".into(),
                    hint: "second spec is not the theta-power of the first".into(),
                });
            }
            let s = p.order();
            let denom = (shape + 1.0) * s - shape;
            if denom <= 0.0 {
                return Err(Error::DivergentIntegral(format!(
                    "gpd residual integral needs (shape+1)s - shape > 0, got {denom}"
                )));
            }
            Ok((scale + shape * p.t) / denom)
        }
        _ => Err(Error::NoClosedForm {
            family: format!("{}/{}", spec_x.family_name(), spec_y.family_name()),
            hint: "closed residual forms cover exponential pairs and \
                   gpd-with-its-theta-power; use the quadrature route"
                .into(),
        }),
    }
}

fn specs_close(a: &DistributionSpec, b: &DistributionSpec) -> bool {
    match (*a.family(), *b.family()) {
        (
            Family::Gpd {
                shape: s1,
                scale: c1,
            },
            Family::Gpd {
                shape: s2,
                scale: c2,
            },
        ) => rel_close(s1, s2) && rel_close(c1, c2),
        _ => a == b,
    }
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Age-t residual measure for an arbitrary pair, by quadrature.
pub fn drcri_pair_quadrature(
    spec_x: &DistributionSpec,
    spec_y: &DistributionSpec,
    alpha: f64,
    beta: f64,
    t: f64,
) -> Result<f64> {
    let sx = SurvivalCurve::from_spec(spec_x);
    let sy = SurvivalCurve::from_spec(spec_y);
    drcri_quadrature(&sx, &sy, alpha, beta, t)
}

/// Residual of the derivative identity R′(t) = (α·h1(t) + β·h2(t))·R(t) − 1,
/// with R′ from central differences on the quadrature evaluation.
pub fn drcri_derivative_identity(
    spec_x: &DistributionSpec,
    spec_y: &DistributionSpec,
    p: &MeasureParams,
) -> Result<f64> {
    let t = p.t;
    let h1 = spec_x.hazard(t)?;
    let h2 = spec_y.hazard(t)?;
    let r = drcri_pair_quadrature(spec_x, spec_y, p.alpha, p.beta, t)?;
    let lo = spec_x.support_infimum().max(spec_y.support_infimum());
    let mut step = 1e-4 * t.abs().max(1.0);
    if t - step < lo {
        step = 0.5 * (t - lo).max(1e-8);
    }
    let rp = central_difference(
        |u| drcri_pair_quadrature(spec_x, spec_y, p.alpha, p.beta, u).unwrap_or(f64::NAN),
        t,
        step,
    );
    if !rp.is_finite() {
        return Err(Error::Domain(format!(
            "residual measure not differentiable near t = {t}"
        )));
    }
    Ok(rp - ((p.alpha * h1 + p.beta * h2) * r - 1.0))
}

/// First-order perturbation of the measure along a scalar family parameter.
/// Returns (approx, exact) where approx adds the slope β/(α+β) · Δθ to the
/// unperturbed diagonal value and exact integrates the perturbed pair.
pub fn taylor_rcri_perturbation<F>(
    make_spec: F,
    theta0: f64,
    delta: f64,
    p: &MeasureParams,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<DistributionSpec>,
{
    if !delta.is_finite() {
        return Err(Error::InvalidParameter("delta must be finite".into()));
    }
    let base = make_spec(theta0)?;
    let bumped = make_spec(theta0 + delta)?;
    let order = p.alpha + p.beta;
    let approx = cregf_value(&base, order)? + (p.beta / order) * delta;
    let exact = rcri_quadrature(&base, &bumped, p.alpha, p.beta)?;
    Ok((approx, exact))
}

/// Slack in the sum bound: cregf(X, 2α) + cregf(Y, 2β) − measure(X, Y, α, β).
/// Nonnegative for all valid inputs.
pub fn amgm_upper_bound_gap(
    spec_x: &DistributionSpec,
    spec_y: &DistributionSpec,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let left = cregf_value(spec_x, 2.0 * alpha)?;
    let right = cregf_value(spec_y, 2.0 * beta)?;
    let cross = rcri_quadrature(spec_x, spec_y, alpha, beta)?;
    Ok(left + right - cross)
}
