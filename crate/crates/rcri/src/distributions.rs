//! Parametric lifetime distributions: survival, density, hazard, mean
//! residual life, quantile and inversion sampling.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::special::{
    gamma_upper_regularized, ln_gamma, normal_cdf, normal_pdf, normal_quantile, normal_sf,
};

/// Distribution family with validated parameters. Construct through the
/// named constructors; direct variant construction is not exposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Survival 1 − x/a on [0, a].
    Uniform { a: f64 },
    /// Survival e^{−λx}.
    Exponential { rate: f64 },
    /// Survival e^{−(λx)^k}.
    Weibull { rate: f64, shape: f64 },
    /// Survival (1 + shape·x/scale)^{−(1+1/shape)}; shape ∈ (−1,0)∪(0,∞).
    /// Negative shape gives the finite support [0, scale/−shape).
    Gpd { shape: f64, scale: f64 },
    /// Survival (k/x)^a on [k, ∞) with scale k, shape a.
    ParetoI { scale: f64, shape: f64 },
    /// Survival (1 + x/a)^{−b} with scale a, shape b.
    ParetoII { scale: f64, shape: f64 },
    /// Survival Φ̄((ln x − μ)/σ).
    Lognormal { mu: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    family: Family,
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.to_string()))
    }
}

impl DistributionSpec {
    pub fn uniform(a: f64) -> Result<Self> {
        require(a.is_finite() && a > 0.0, "uniform needs a > 0")?;
        Ok(Self {
            family: Family::Uniform { a },
        })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        require(rate.is_finite() && rate > 0.0, "exponential needs rate > 0")?;
        Ok(Self {
            family: Family::Exponential { rate },
        })
    }

    pub fn weibull(rate: f64, shape: f64) -> Result<Self> {
        require(rate.is_finite() && rate > 0.0, "weibull needs rate > 0")?;
        require(shape.is_finite() && shape > 0.0, "weibull needs shape > 0")?;
        Ok(Self {
            family: Family::Weibull { rate, shape },
        })
    }

    /// GPD with survival (1 + shape·x/scale)^{−(1+1/shape)}.
    pub fn gpd(shape: f64, scale: f64) -> Result<Self> {
        require(
            shape.is_finite() && shape > -1.0 && shape != 0.0,
            "gpd needs shape in (-1, 0) or (0, inf)",
        )?;
        require(scale.is_finite() && scale > 0.0, "gpd needs scale > 0")?;
        Ok(Self {
            family: Family::Gpd { shape, scale },
        })
    }

    /// GPD written as (1 + (b/a)·x)^{−(1+1/b)}. Same law as `gpd(b, a)`;
    /// the two letterings swap which symbol plays shape and scale.
    pub fn gpd_ab(a: f64, b: f64) -> Result<Self> {
        Self::gpd(b, a)
    }

    pub fn pareto_i(scale: f64, shape: f64) -> Result<Self> {
        require(
            scale.is_finite() && scale > 0.0,
            "pareto1 needs scale k > 0",
        )?;
        require(
            shape.is_finite() && shape > 0.0,
            "pareto1 needs shape a > 0",
        )?;
        Ok(Self {
            family: Family::ParetoI { scale, shape },
        })
    }

    pub fn pareto_ii(scale: f64, shape: f64) -> Result<Self> {
        require(
            scale.is_finite() && scale > 0.0,
            "pareto2 needs scale a > 0",
        )?;
        require(
            shape.is_finite() && shape > 0.0,
            "pareto2 needs shape b > 0",
        )?;
        Ok(Self {
            family: Family::ParetoII { scale, shape },
        })
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        require(mu.is_finite(), "lognormal needs finite mu")?;
        require(
            sigma.is_finite() && sigma > 0.0,
            "lognormal needs sigma > 0",
        )?;
        Ok(Self {
            family: Family::Lognormal { mu, sigma },
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Uniform { .. } => "uniform",
            Family::Exponential { .. } => "exponential",
            Family::Weibull { .. } => "weibull",
            Family::Gpd { .. } => "gpd",
            Family::ParetoI { .. } => "pareto1",
            Family::ParetoII { .. } => "pareto2",
            Family::Lognormal { .. } => "lognormal",
        }
    }

    pub fn support_infimum(&self) -> f64 {
        match self.family {
            Family::ParetoI { scale, .. } => scale,
            _ => 0.0,
        }
    }

    pub fn support_supremum(&self) -> Option<f64> {
        match self.family {
            Family::Uniform { a } => Some(a),
            Family::Gpd { shape, scale } if shape < 0.0 => Some(scale / -shape),
            _ => None,
        }
    }

    /// Finite mean where it exists.
    pub fn mean(&self) -> Option<f64> {
        match self.family {
            Family::Uniform { a } => Some(a / 2.0),
            Family::Exponential { rate } => Some(1.0 / rate),
            Family::Weibull { rate, shape } => {
                Some((ln_gamma(1.0 / shape) - (rate * shape).ln()).exp())
            }
            Family::Gpd { scale, .. } => Some(scale),
            Family::ParetoI { scale, shape } => {
                (shape > 1.0).then(|| shape * scale / (shape - 1.0))
            }
            Family::ParetoII { scale, shape } => (shape > 1.0).then(|| scale / (shape - 1.0)),
            Family::Lognormal { mu, sigma } => Some((mu + 0.5 * sigma * sigma).exp()),
        }
    }

    /// P(X > x). Values below the support infimum return 1.
    pub fn survival(&self, x: f64) -> f64 {
        match self.family {
            Family::Uniform { a } => {
                if x <= 0.0 {
                    1.0
                } else if x >= a {
                    0.0
                } else {
                    1.0 - x / a
                }
            }
            Family::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Family::Weibull { rate, shape } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-(rate * x).powf(shape)).exp()
                }
            }
            Family::Gpd { shape, scale } => {
                if x <= 0.0 {
                    return 1.0;
                }
                let z = 1.0 + shape * x / scale;
                if z <= 0.0 {
                    0.0
                } else {
                    z.powf(-(1.0 + 1.0 / shape))
                }
            }
            Family::ParetoI { scale, shape } => {
                if x <= scale {
                    1.0
                } else {
                    (scale / x).powf(shape)
                }
            }
            Family::ParetoII { scale, shape } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (1.0 + x / scale).powf(-shape)
                }
            }
            Family::Lognormal { mu, sigma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    normal_sf((x.ln() - mu) / sigma)
                }
            }
        }
    }

    /// Density −d/dx survival(x); zero outside the support interior.
    pub fn density(&self, x: f64) -> f64 {
        match self.family {
            Family::Uniform { a } => {
                if x < 0.0 || x > a {
                    0.0
                } else {
                    1.0 / a
                }
            }
            Family::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Family::Weibull { rate, shape } => {
                if x <= 0.0 {
                    if shape == 1.0 && x == 0.0 {
                        rate
                    } else {
                        0.0
                    }
                } else {
                    let z = rate * x;
                    rate * shape * z.powf(shape - 1.0) * (-z.powf(shape)).exp()
                }
            }
            Family::Gpd { shape, scale } => {
                if x < 0.0 {
                    return 0.0;
                }
                let z = 1.0 + shape * x / scale;
                if z <= 0.0 {
                    0.0
                } else {
                    (shape + 1.0) / scale * z.powf(-(2.0 + 1.0 / shape))
                }
            }
            Family::ParetoI { scale, shape } => {
                if x < scale {
                    0.0
                } else {
                    shape / x * (scale / x).powf(shape)
                }
            }
            Family::ParetoII { scale, shape } => {
                if x < 0.0 {
                    0.0
                } else {
                    shape / scale * (1.0 + x / scale).powf(-shape - 1.0)
                }
            }
            Family::Lognormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    normal_pdf((x.ln() - mu) / sigma) / (x * sigma)
                }
            }
        }
    }

    /// Hazard rate density/survival at interior support points.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        if x < self.support_infimum() {
            return Err(Error::Domain(format!(
                "hazard of {} undefined below the support infimum {}",
                self.label(),
                self.support_infimum()
            )));
        }
        let s = self.survival(x);
        if s <= 0.0 {
            return Err(Error::Domain(format!(
                "hazard of {} undefined at x = {x} where survival is 0",
                self.label()
            )));
        }
        Ok(match self.family {
            Family::Exponential { rate } => rate,
            Family::Gpd { shape, scale } => (shape + 1.0) / (scale + shape * x),
            Family::ParetoII { scale, shape } => shape / (scale + x),
            _ => self.density(x) / s,
        })
    }

    /// Mean residual life E(X − t | X > t).
    pub fn mrl(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain("mrl needs t >= 0".into()));
        }
        if self.mean().is_none() {
            return Err(Error::Domain(format!(
                "mrl of {} undefined: infinite mean",
                self.label()
            )));
        }
        let s = self.survival(t);
        if s <= 0.0 {
            return Err(Error::Domain(format!(
                "mrl of {} undefined at t = {t} where survival is 0",
                self.label()
            )));
        }
        Ok(match self.family {
            Family::Uniform { a } => (a - t) / 2.0,
            Family::Exponential { rate } => 1.0 / rate,
            Family::Weibull { rate, shape } => {
                let z = (rate * t).powf(shape);
                let tail = (ln_gamma(1.0 / shape) - (rate * shape).ln()).exp()
                    * gamma_upper_regularized(1.0 / shape, z);
                tail / s
            }
            Family::Gpd { shape, scale } => scale + shape * t,
            Family::ParetoI { scale, shape } => {
                if t <= scale {
                    shape * scale / (shape - 1.0) - t
                } else {
                    t / (shape - 1.0)
                }
            }
            Family::ParetoII { scale, shape } => (scale + t) / (shape - 1.0),
            Family::Lognormal { mu, sigma } => {
                if t == 0.0 {
                    (mu + 0.5 * sigma * sigma).exp()
                } else {
                    let z = (t.ln() - mu) / sigma;
                    (mu + 0.5 * sigma * sigma).exp() * normal_cdf(sigma - z) / s - t
                }
            }
        })
    }

    /// Inverse CDF: the x with P(X ≤ x) = p.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "quantile needs p in (0,1), got {p}"
            )));
        }
        Ok(self.inverse_survival(1.0 - p))
    }

    // x with survival(x) = u, for u in (0, 1].
    fn inverse_survival(&self, u: f64) -> f64 {
        match self.family {
            Family::Uniform { a } => a * (1.0 - u),
            Family::Exponential { rate } => -u.ln() / rate,
            Family::Weibull { rate, shape } => {
                if shape == 1.0 {
                    -u.ln() / rate
                } else {
                    (-u.ln()).powf(1.0 / shape) / rate
                }
            }
            Family::Gpd { shape, scale } => scale / shape * (u.powf(-shape / (shape + 1.0)) - 1.0),
            Family::ParetoI { scale, shape } => scale * u.powf(-1.0 / shape),
            Family::ParetoII { scale, shape } => scale * (u.powf(-1.0 / shape) - 1.0),
            Family::Lognormal { mu, sigma } => (mu + sigma * normal_quantile(1.0 - u)).exp(),
        }
    }

    /// n i.i.d. draws by inversion, deterministic for a given seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        if n == 0 {
            return Err(Error::InvalidParameter("sample needs n >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            let u = 1.0 - rng.gen::<f64>();
            values.push(self.inverse_survival(u));
        }
        let mut s = Sample::new(values)?;
        s.origin = Some(SampleOrigin { spec: *self, seed });
        Ok(s)
    }

    /// Proportional-hazards power: the spec whose survival is this one's
    /// raised to θ, when the family is closed under that operation.
    pub fn ph_power(&self, theta: f64) -> Option<DistributionSpec> {
        if !(theta.is_finite() && theta > 0.0) {
            return None;
        }
        match self.family {
            Family::Uniform { a } => {
                DistributionSpec::gpd(-1.0 / (1.0 + theta), a / (1.0 + theta)).ok()
            }
            Family::Exponential { rate } => DistributionSpec::exponential(rate * theta).ok(),
            Family::Weibull { rate, shape } => {
                DistributionSpec::weibull(rate * theta.powf(1.0 / shape), shape).ok()
            }
            Family::Gpd { shape, scale } => {
                let d = (shape + 1.0) * theta - shape;
                if d <= 0.0 {
                    None
                } else {
                    DistributionSpec::gpd(shape / d, scale / d).ok()
                }
            }
            Family::ParetoI { scale, shape } => {
                DistributionSpec::pareto_i(scale, shape * theta).ok()
            }
            Family::ParetoII { scale, shape } => {
                DistributionSpec::pareto_ii(scale, shape * theta).ok()
            }
            Family::Lognormal { .. } => None,
        }
    }

    /// Textual form accepted back by the parser, e.g. `exponential:1`.
    pub fn label(&self) -> String {
        match self.family {
            Family::Uniform { a } => format!("uniform:{a}"),
            Family::Exponential { rate } => format!("exponential:{rate}"),
            Family::Weibull { rate, shape } => format!("weibull:{rate},{shape}"),
            Family::Gpd { shape, scale } => format!("gpd:{shape},{scale}"),
            Family::ParetoI { scale, shape } => format!("pareto1:{scale},{shape}"),
            Family::ParetoII { scale, shape } => format!("pareto2:{scale},{shape}"),
            Family::Lognormal { mu, sigma } => format!("lognormal:{mu},{sigma}"),
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Parses `family:p1[,p2]` with `.` as the decimal separator.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected family:params, got {s:?}")))?;
        let params: Vec<f64> = rest
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad numeric parameter {p:?} in {s:?}")))
            })
            .collect::<Result<_>>()?;
        let arity = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{name} takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "uniform" => {
                arity(1)?;
                Self::uniform(params[0])
            }
            "exponential" | "exp" => {
                arity(1)?;
                Self::exponential(params[0])
            }
            "weibull" => {
                arity(2)?;
                Self::weibull(params[0], params[1])
            }
            "gpd" => {
                arity(2)?;
                Self::gpd(params[0], params[1])
            }
            "pareto1" | "paretoi" | "pareto_i" => {
                arity(2)?;
                Self::pareto_i(params[0], params[1])
            }
            "pareto2" | "paretoii" | "pareto_ii" => {
                arity(2)?;
                Self::pareto_ii(params[0], params[1])
            }
            "lognormal" => {
                arity(2)?;
                Self::lognormal(params[0], params[1])
            }
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

/// Where a synthetic sample came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOrigin {
    pub spec: DistributionSpec,
    pub seed: u64,
}

/// Nonnegative observations, sorted ascending on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    origin: Option<SampleOrigin>,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("sample must be nonempty".into()));
        }
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "sample values must be finite and nonnegative, got {v}"
                )));
            }
        }
        values.sort_by(|a, b| a.total_cmp(b));
        Ok(Self {
            values,
            origin: None,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn origin(&self) -> Option<&SampleOrigin> {
        self.origin.as_ref()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn mean(&self) -> f64 {
        crate::numerics::mean(&self.values)
    }

    /// Sample standard deviation with denominator n−1.
    pub fn std_dev(&self) -> f64 {
        crate::numerics::std_dev(&self.values, 1)
    }
}

/// Exponential(λ̂) with λ̂ = 1/mean.
pub fn mle_exponential(s: &Sample) -> Result<DistributionSpec> {
    let m = s.mean();
    if m <= 0.0 {
        return Err(Error::InvalidParameter(
            "exponential MLE needs a positive sample mean".into(),
        ));
    }
    DistributionSpec::exponential(1.0 / m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn all_families() -> Vec<DistributionSpec> {
        vec![
            DistributionSpec::uniform(2.0).unwrap(),
            DistributionSpec::exponential(1.0).unwrap(),
            DistributionSpec::weibull(1.0, 2.0).unwrap(),
            DistributionSpec::gpd(0.5, 2.0).unwrap(),
            DistributionSpec::gpd(-0.4, 1.0).unwrap(),
            DistributionSpec::pareto_i(1.0, 3.0).unwrap(),
            DistributionSpec::pareto_ii(1.0, 3.0).unwrap(),
            DistributionSpec::lognormal(0.0, 1.0).unwrap(),
        ]
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DistributionSpec::exponential(0.0).is_err());
        assert!(DistributionSpec::exponential(-1.0).is_err());
        assert!(DistributionSpec::weibull(1.0, 0.0).is_err());
        assert!(DistributionSpec::gpd(-1.0, 1.0).is_err());
        assert!(DistributionSpec::gpd(0.0, 1.0).is_err());
        assert!(DistributionSpec::gpd(0.5, 0.0).is_err());
        assert!(DistributionSpec::pareto_i(0.0, 3.0).is_err());
        assert!(DistributionSpec::lognormal(0.0, 0.0).is_err());
        assert!(DistributionSpec::uniform(f64::NAN).is_err());
    }

    #[test]
    fn survival_at_origin_is_one() {
        for spec in all_families() {
            let x0 = spec.support_infimum();
            assert_eq!(spec.survival(x0), 1.0, "{}", spec.label());
            assert_eq!(spec.survival(x0 - 1.0), 1.0);
        }
    }

    #[test]
    fn survival_known_values() {
        let u = DistributionSpec::uniform(2.0).unwrap();
        assert_abs_diff_eq!(u.survival(1.0), 0.5);
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(e.survival(0.0), 1.0);
        let w = DistributionSpec::weibull(1.0, 1.0).unwrap();
        for t in [0.5, 1.0, 2.0] {
            assert_abs_diff_eq!(w.survival(t), e.survival(t), epsilon = 1e-15);
        }
    }

    #[test]
    fn survival_vanishes_in_the_limit() {
        for spec in all_families() {
            let far = spec.support_supremum().unwrap_or(1e9);
            assert!(spec.survival(far) <= 1e-12, "{}", spec.label());
        }
    }

    #[test]
    fn density_matches_survival_slope_on_grid() {
        for spec in all_families() {
            for i in 1..=100 {
                let p = i as f64 / 101.0;
                let x = spec.quantile(p).unwrap();
                let h = 1e-5 * x.abs().max(1.0);
                let fd = (spec.survival(x - h) - spec.survival(x + h)) / (2.0 * h);
                let d = spec.density(x);
                assert!(
                    (d - fd).abs() <= 1e-6 * d.abs().max(1.0),
                    "{} at x={x}: density {d} vs slope {fd}",
                    spec.label()
                );
            }
        }
    }

    #[test]
    fn hazard_identity_and_known_values() {
        let e = DistributionSpec::exponential(2.0).unwrap();
        for x in [0.0, 0.3, 5.0] {
            assert_abs_diff_eq!(e.hazard(x).unwrap(), 2.0);
        }

        // reciprocal-linear hazard of the GPD
        let g = DistributionSpec::gpd(0.5, 2.0).unwrap();
        for x in [0.0, 1.0, 2.0] {
            let h = g.hazard(x).unwrap();
            assert_relative_eq!(h, 1.5 / (2.0 + 0.5 * x), max_relative = 1e-12);
        }

        // finite-difference oracle for ParetoI(k=1, a=3) at x=2
        let p = DistributionSpec::pareto_i(1.0, 3.0).unwrap();
        let h = 1e-6;
        let fd = (p.survival(2.0 - h) - p.survival(2.0 + h)) / (2.0 * h);
        let oracle = fd / p.survival(2.0);
        assert_relative_eq!(p.hazard(2.0).unwrap(), oracle, max_relative = 1e-8);
        assert_relative_eq!(p.hazard(2.0).unwrap(), 1.5, max_relative = 1e-12);

        for spec in all_families() {
            let x = spec.quantile(0.5).unwrap();
            let ratio = spec.density(x) / spec.survival(x);
            assert_relative_eq!(spec.hazard(x).unwrap(), ratio, max_relative = 1e-12);
        }
    }

    #[test]
    fn hazard_outside_domain_errors() {
        let u = DistributionSpec::uniform(1.0).unwrap();
        assert!(u.hazard(1.0).is_err());
        let p = DistributionSpec::pareto_i(2.0, 3.0).unwrap();
        assert!(p.hazard(1.0).is_err());
    }

    #[test]
    fn mrl_known_values() {
        let e = DistributionSpec::exponential(2.0).unwrap();
        for t in [0.0, 0.7, 3.0] {
            assert_abs_diff_eq!(e.mrl(t).unwrap(), 0.5, epsilon = 1e-14);
        }
        let u = DistributionSpec::uniform(1.0).unwrap();
        assert_abs_diff_eq!(u.mrl(0.0).unwrap(), 0.5);

        // GPD mrl is linear with slope = shape
        let g = DistributionSpec::gpd(0.5, 2.0).unwrap();
        let m: Vec<f64> = [0.0, 1.0, 2.0, 3.0]
            .iter()
            .map(|&t| g.mrl(t).unwrap())
            .collect();
        let d1 = m[1] - m[0];
        for w in m.windows(2) {
            assert_abs_diff_eq!(w[1] - w[0], d1, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(d1, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn mrl_infinite_mean_rejected() {
        let p = DistributionSpec::pareto_i(1.0, 0.8).unwrap();
        assert!(matches!(p.mrl(2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn mrl_integral_oracle() {
        // Simpson rule on the survival tail against the closed forms
        for spec in [
            DistributionSpec::weibull(1.0, 2.0).unwrap(),
            DistributionSpec::lognormal(0.2, 0.6).unwrap(),
            DistributionSpec::pareto_ii(1.0, 3.0).unwrap(),
        ] {
            let t = 0.8;
            let hi = spec.quantile(1.0 - 1e-12).unwrap();
            let n = 400_000;
            let h = (hi - t) / n as f64;
            let mut acc = spec.survival(t) + spec.survival(hi);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * spec.survival(t + i as f64 * h);
            }
            let oracle = acc * h / 3.0 / spec.survival(t);
            assert_relative_eq!(spec.mrl(t).unwrap(), oracle, max_relative = 1e-5);
        }
    }

    #[test]
    fn hazard_mrl_relation() {
        // (1 + m'(t)) / m(t) = h(t)
        for spec in [
            DistributionSpec::exponential(1.3).unwrap(),
            DistributionSpec::gpd(0.5, 2.0).unwrap(),
            DistributionSpec::gpd(-0.3, 1.5).unwrap(),
            DistributionSpec::pareto_ii(2.0, 4.0).unwrap(),
        ] {
            for i in 0..20 {
                let t = 0.05 + 0.1 * i as f64;
                if spec.survival(t + 1e-4) <= 0.0 {
                    continue;
                }
                let h = 1e-5 * t.max(1.0);
                let md = (spec.mrl(t + h).unwrap() - spec.mrl(t - h).unwrap()) / (2.0 * h);
                let lhs = (1.0 + md) / spec.mrl(t).unwrap();
                assert!(
                    (lhs - spec.hazard(t).unwrap()).abs() <= 1e-4,
                    "{} at t={t}",
                    spec.label()
                );
            }
        }
    }

    #[test]
    fn quantile_survival_inverses() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert_abs_diff_eq!(
            e.quantile(1.0 - (-1.0f64).exp()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let p2 = DistributionSpec::pareto_ii(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(p2.quantile(0.5).unwrap(), 1.0, epsilon = 1e-12);

        for spec in all_families() {
            for i in 1..100 {
                let p = i as f64 / 100.0;
                let x = spec.quantile(p).unwrap();
                assert_abs_diff_eq!(spec.survival(x), 1.0 - p, epsilon = 1e-10);
            }
            // boundary: p -> 0+ stays at the support edge with survival ~ 1
            let lo = spec.quantile(1e-12).unwrap();
            assert!(lo >= spec.support_infimum() - 1e-12, "{}", spec.label());
            assert!(spec.survival(lo) >= 1.0 - 1e-9, "{}", spec.label());
        }
        assert!(e.quantile(0.0).is_err());
        assert!(e.quantile(1.0).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_recorded() {
        let spec = DistributionSpec::exponential(1.0).unwrap();
        let a = spec.sample(100, 42).unwrap();
        let b = spec.sample(100, 42).unwrap();
        assert_eq!(a.values(), b.values());
        let o = a.origin().unwrap();
        assert_eq!(o.seed, 42);
        assert_eq!(o.spec, spec);
        assert!(spec.sample(0, 1).is_err());
    }

    #[test]
    fn weibull_shape_one_samples_match_exponential() {
        let w = DistributionSpec::weibull(1.0, 1.0).unwrap();
        let e = DistributionSpec::exponential(1.0).unwrap();
        let sw = w.sample(1000, 7).unwrap();
        let se = e.sample(1000, 7).unwrap();
        assert_eq!(sw.values(), se.values());
    }

    #[test]
    fn sample_mean_within_clt_band() {
        let spec = DistributionSpec::exponential(1.0).unwrap();
        let s = spec.sample(100_000, 9).unwrap();
        // sd of the mean is 1/sqrt(n)
        assert!((s.mean() - 1.0).abs() < 3.0 / (100_000f64).sqrt());
    }

    #[test]
    fn empirical_cdf_close_to_model() {
        // KS distance on 1e5 inversion draws, fixed seed
        for spec in all_families() {
            let s = spec.sample(100_000, 1234).unwrap();
            let n = s.len() as f64;
            let mut ks: f64 = 0.0;
            for (i, &x) in s.values().iter().enumerate() {
                let cdf = 1.0 - spec.survival(x);
                ks = ks
                    .max(((i + 1) as f64 / n - cdf).abs())
                    .max((cdf - i as f64 / n).abs());
            }
            assert!(ks <= 0.01, "{}: ks={ks}", spec.label());
        }
    }

    #[test]
    fn exponential_mle_examples() {
        let s = Sample::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            mle_exponential(&s).unwrap(),
            DistributionSpec::exponential(1.0).unwrap()
        );
        let s = Sample::new(vec![2.0, 4.0]).unwrap();
        let fit = mle_exponential(&s).unwrap();
        match fit.family() {
            Family::Exponential { rate } => assert_abs_diff_eq!(*rate, 1.0 / 3.0),
            _ => unreachable!(),
        }

        let spec = DistributionSpec::exponential(0.8).unwrap();
        let s = spec.sample(100_000, 5).unwrap();
        match mle_exponential(&s).unwrap().family() {
            Family::Exponential { rate } => assert!((rate - 0.8).abs() < 0.02),
            _ => unreachable!(),
        }

        let zeros = Sample::new(vec![0.0, 0.0]).unwrap();
        assert!(mle_exponential(&zeros).is_err());
    }

    #[test]
    fn sample_rejects_bad_values() {
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, -0.5]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
        let s = Sample::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn ph_power_closures_match_pointwise() {
        let theta = 1.7;
        let cases = vec![
            DistributionSpec::uniform(2.0).unwrap(),
            DistributionSpec::exponential(1.3).unwrap(),
            DistributionSpec::weibull(0.8, 2.5).unwrap(),
            DistributionSpec::gpd(0.5, 2.0).unwrap(),
            DistributionSpec::pareto_i(1.0, 3.0).unwrap(),
            DistributionSpec::pareto_ii(2.0, 3.0).unwrap(),
        ];
        for spec in cases {
            let ph = spec.ph_power(theta).unwrap();
            for i in 1..40 {
                let x = spec.quantile(i as f64 / 41.0).unwrap();
                assert_relative_eq!(
                    ph.survival(x),
                    spec.survival(x).powf(theta),
                    max_relative = 1e-10
                );
            }
        }
        assert!(DistributionSpec::lognormal(0.0, 1.0)
            .unwrap()
            .ph_power(theta)
            .is_none());
    }

    #[test]
    fn spec_strings_round_trip() {
        for spec in all_families() {
            let parsed: DistributionSpec = spec.label().parse().unwrap();
            assert_eq!(parsed, spec);
        }
        assert!("exponential".parse::<DistributionSpec>().is_err());
        assert!("exponential:".parse::<DistributionSpec>().is_err());
        assert!("exponential:1,2".parse::<DistributionSpec>().is_err());
        assert!("nosuch:1".parse::<DistributionSpec>().is_err());
        assert!("weibull:1".parse::<DistributionSpec>().is_err());
        assert!("exponential:-1".parse::<DistributionSpec>().is_err());
        let g: DistributionSpec = "gpd:0.5,2".parse().unwrap();
        assert_eq!(g, DistributionSpec::gpd(0.5, 2.0).unwrap());
    }

    #[test]
    fn gpd_letterings_swap_roles() {
        let direct = DistributionSpec::gpd(0.5, 2.0).unwrap();
        let swapped = DistributionSpec::gpd_ab(2.0, 0.5).unwrap();
        assert_eq!(direct, swapped);
    }
}
