//! Small numeric utilities: compensated summation, moments, line fits,
//! finite differences, and a Kolmogorov–Smirnov distance to the standard
//! normal.

use crate::special::normal_cdf;

/// Neumaier-compensated accumulator. Summation order still matters for the
/// last few ulps, so reductions that must be order-independent always feed
/// it serially in index order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_total(values: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

pub fn mean(values: &[f64]) -> f64 {
    compensated_total(values) / values.len() as f64
}

/// Sample variance with the given delta degrees of freedom (0 or 1).
pub fn variance(values: &[f64], ddof: usize) -> f64 {
    let n = values.len();
    assert!(n > ddof, "variance needs more than {ddof} values");
    let m = mean(values);
    let mut acc = CompensatedSum::new();
    for &v in values {
        let d = v - m;
        acc.add(d * d);
    }
    acc.value() / (n - ddof) as f64
}

pub fn std_dev(values: &[f64], ddof: usize) -> f64 {
    variance(values, ddof).sqrt()
}

/// Third and fourth standardized moments of the values.
/// Returns (skewness, excess kurtosis).
pub fn skewness_kurtosis(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = mean(values);
    let (mut m2, mut m3, mut m4) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for &v in values {
        let d = v - m;
        let d2 = d * d;
        m2.add(d2);
        m3.add(d2 * d);
        m4.add(d2 * d2);
    }
    let v2 = m2.value() / n;
    let v3 = m3.value() / n;
    let v4 = m4.value() / n;
    (v3 / v2.powf(1.5), v4 / (v2 * v2) - 3.0)
}

/// Coefficient of variation: population standard deviation over mean.
pub fn coefficient_of_variation(values: &[f64]) -> f64 {
    let m = mean(values);
    if m == 0.0 {
        return f64::INFINITY;
    }
    std_dev(values, 0) / m.abs()
}

/// Ordinary least-squares line fit y ≈ slope·x + intercept.
/// Returns (slope, intercept, r_squared). A constant response is treated
/// as a perfect fit (r² = 1) since any horizontal line matches it.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = mean(xs);
    let my = mean(ys);
    let (mut sxx, mut sxy, mut syy) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    let sxx = sxx.value();
    let sxy = sxy.value();
    let syy = syy.value();
    if syy <= (1e-15 * my).powi(2) * n {
        return (0.0, my, 1.0);
    }
    if sxx == 0.0 {
        return (0.0, my, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = (sxy * sxy) / (sxx * syy);
    (slope, my - slope * mx, r2)
}

/// Symmetric central difference (f(x+h) − f(x−h)) / 2h.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Two-sided Kolmogorov–Smirnov distance between the empirical distribution
/// of `values` and the standard normal.
pub fn ks_distance_standard_normal(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &z) in sorted.iter().enumerate() {
        let cdf = normal_cdf(z);
        let hi = (i + 1) as f64 / n - cdf;
        let lo = cdf - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn compensated_sum_handles_cancellation() {
        let mut acc = CompensatedSum::new();
        acc.add(1e16);
        acc.add(1.0);
        acc.add(-1e16);
        assert_eq!(acc.value(), 1.0);
    }

    #[test]
    fn variance_of_known_values() {
        let v = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert_abs_diff_eq!(variance(&v, 0), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(std_dev(&v, 1), (32.0f64 / 7.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (slope, intercept, r2) = linear_fit(&xs, &ys);
        assert_abs_diff_eq!(slope, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(intercept, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn linear_fit_constant_response_is_perfect() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [3.0, 3.0, 3.0];
        let (slope, _, r2) = linear_fit(&xs, &ys);
        assert_eq!(slope, 0.0);
        assert_eq!(r2, 1.0);
    }

    #[test]
    fn skewness_of_symmetric_values_is_zero() {
        let v = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let (sk, _) = skewness_kurtosis(&v);
        assert_abs_diff_eq!(sk, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn central_difference_of_square() {
        let d = central_difference(|x| x * x, 3.0, 1e-6);
        assert_abs_diff_eq!(d, 6.0, epsilon = 1e-8);
    }

    #[test]
    fn ks_distance_detects_shift() {
        let shifted: Vec<f64> = (0..1000).map(|i| (i as f64 / 1000.0) * 6.0 - 1.0).collect();
        assert!(ks_distance_standard_normal(&shifted) > 0.2);
    }
}
