//! Monte Carlo harness: bias/MSE studies of the plug-in estimators against
//! analytic or quadrature truth, bootstrap resampling, and the
//! asymptotic-normality study.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{
    cregf, drcri_closed_form, rcri_quadrature, rcri_two_exponentials, MeasureParams,
};
use crate::distributions::{mle_exponential, DistributionSpec, Family, Sample};
use crate::error::{Error, Result};
use crate::estimators::{drcri_hat_opts, rcri_hat_opts, EstimatorOptions};
use crate::numerics::{skewness_kurtosis, std_dev, CompensatedSum};

/// How the reference value the estimator is judged against is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TruthRule {
    ClosedForm,
    Quadrature,
}

/// One simulation scenario: a pair of generating distributions, measure
/// parameters, sample sizes, and a reproducible seed.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub spec_x: DistributionSpec,
    pub spec_y: DistributionSpec,
    pub params: MeasureParams,
    pub n_values: Vec<usize>,
    pub replicates: usize,
    pub base_seed: u64,
    pub truth: TruthRule,
    pub estimator: EstimatorOptions,
    pub scenario: String,
}

impl SimConfig {
    pub fn new(spec_x: DistributionSpec, spec_y: DistributionSpec, params: MeasureParams) -> Self {
        let scenario = format!("{}|{}", spec_x.label(), spec_y.label());
        Self {
            spec_x,
            spec_y,
            params,
            n_values: vec![10, 20, 30, 40, 50],
            replicates: 10_000,
            base_seed: 20,
            truth: TruthRule::ClosedForm,
            estimator: EstimatorOptions::default(),
            scenario,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::InvalidParameter("n_values must be nonempty".into()));
        }
        if self.n_values.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter("every n must be >= 2".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicates must be >= 1".into()));
        }
        Ok(())
    }
}

/// Aggregated result of one (scenario, n) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub scenario: String,
    pub n: usize,
    pub replicates: usize,
    pub truth_value: f64,
    pub bias: f64,
    pub mse: f64,
    pub mean_estimate: f64,
}

/// Bootstrap variant of the report; degenerate (zero-variance) resamples
/// are redrawn and counted.
#[derive(Debug, Clone, Serialize)]
pub struct BootstrapReport {
    pub report: SimReport,
    pub degenerate_redraws: usize,
}

/// Result of the asymptotic-normality study on standardized estimates.
#[derive(Debug, Clone, Serialize)]
pub struct NormalityReport {
    pub n: usize,
    pub m: usize,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub standardized: Vec<f64>,
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Counter-based per-replicate seed: replicates can run in any order or
/// in parallel and still draw identical samples.
pub fn replicate_seed(base_seed: u64, scenario: &str, n: usize, rep: usize, role: u64) -> u64 {
    let mut s = base_seed ^ fnv1a(scenario.as_bytes());
    s = splitmix64(s ^ (n as u64).wrapping_mul(0x9e3779b97f4a7c15));
    s = splitmix64(s ^ (rep as u64).wrapping_mul(0xc2b2ae3d27d4eb4f));
    splitmix64(s ^ role)
}

fn truth_value(cfg: &SimConfig) -> Result<f64> {
    match cfg.truth {
        TruthRule::ClosedForm => closed_form_truth(cfg),
        TruthRule::Quadrature => {
            if cfg.params.t > 0.0 {
                crate::analytic::drcri_pair_quadrature(
                    &cfg.spec_x,
                    &cfg.spec_y,
                    cfg.params.alpha,
                    cfg.params.beta,
                    cfg.params.t,
                )
            } else {
                rcri_quadrature(&cfg.spec_x, &cfg.spec_y, cfg.params.alpha, cfg.params.beta)
            }
        }
    }
}

fn closed_form_truth(cfg: &SimConfig) -> Result<f64> {
    let p = &cfg.params;
    match (*cfg.spec_x.family(), *cfg.spec_y.family()) {
        (Family::Exponential { rate: l1 }, Family::Exponential { rate: l2 }) => {
            // memorylessness makes the residual value age-free
            rcri_two_exponentials(l1, l2, p.alpha, p.beta)
        }
        _ if cfg.params.t > 0.0 => drcri_closed_form(&cfg.spec_x, &cfg.spec_y, p),
        _ if cfg.spec_x == cfg.spec_y => cregf(&cfg.spec_x, p.alpha + p.beta),
        _ => Err(Error::NoClosedForm {
            family: format!("{}/{}", cfg.spec_x.family_name(), cfg.spec_y.family_name()),
            hint: "no closed truth for this pair; use the quadrature truth rule".into(),
        }),
    }
}

fn estimate_one(cfg: &SimConfig, n: usize, rep: usize) -> Result<f64> {
    let sx = cfg
        .spec_x
        .sample(n, replicate_seed(cfg.base_seed, &cfg.scenario, n, rep, 0))?;
    let sy = cfg
        .spec_y
        .sample(n, replicate_seed(cfg.base_seed, &cfg.scenario, n, rep, 1))?;
    if cfg.params.t > 0.0 {
        drcri_hat_opts(
            &sx,
            &sy,
            cfg.params.alpha,
            cfg.params.beta,
            cfg.params.t,
            &cfg.estimator,
        )
    } else {
        rcri_hat_opts(&sx, &sy, cfg.params.alpha, cfg.params.beta, &cfg.estimator)
    }
}

fn aggregate(scenario: &str, n: usize, truth: f64, estimates: &[f64]) -> SimReport {
    let mut mean = CompensatedSum::new();
    let mut sq = CompensatedSum::new();
    for &v in estimates {
        mean.add(v);
        let d = v - truth;
        sq.add(d * d);
    }
    let m = estimates.len() as f64;
    let mean_estimate = mean.value() / m;
    SimReport {
        scenario: scenario.to_string(),
        n,
        replicates: estimates.len(),
        truth_value: truth,
        bias: mean_estimate - truth,
        mse: sq.value() / m,
        mean_estimate,
    }
}

/// Bias/MSE study over the configured sample sizes. Replicates execute in
/// parallel; the reduction order is fixed by replicate index, so results
/// are bit-identical at any thread count.
pub fn run_bias_mse(cfg: &SimConfig) -> Result<Vec<SimReport>> {
    cfg.validate()?;
    let truth = truth_value(cfg)?;
    let mut reports = Vec::with_capacity(cfg.n_values.len());
    for &n in &cfg.n_values {
        let estimates: Vec<f64> = (0..cfg.replicates)
            .into_par_iter()
            .map(|rep| estimate_one(cfg, n, rep))
            .collect::<Result<Vec<f64>>>()?;
        reports.push(aggregate(&cfg.scenario, n, truth, &estimates));
    }
    Ok(reports)
}

/// The bias/MSE study across a grid of truncation ages. Each age is an
/// independent scenario cell (its own seed stream and truth value).
pub fn run_drcri_bias_mse(cfg: &SimConfig, t_grid: &[f64]) -> Result<Vec<SimReport>> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("t grid must be nonempty".into()));
    }
    let mut all = Vec::new();
    for &t in t_grid {
        let mut sub = cfg.clone();
        sub.params = cfg.params.with_t(t)?;
        sub.scenario = format!("{}|t={t}", cfg.scenario);
        all.extend(run_bias_mse(&sub)?);
    }
    Ok(all)
}

pub(crate) fn exponential_rate(spec: &DistributionSpec) -> Result<f64> {
    match *spec.family() {
        Family::Exponential { rate } => Ok(rate),
        _ => Err(Error::InvalidParameter(
            "plug-in truth needs an exponential fit".into(),
        )),
    }
}

/// Bootstrap study: B resamples with replacement of both samples, measure
/// re-estimated each time, judged against the exponential-MLE plug-in value
/// 1/(α·λ̂x + β·λ̂y).
pub fn bootstrap_bias_mse(
    sx: &Sample,
    sy: &Sample,
    params: &MeasureParams,
    b: usize,
    seed: u64,
) -> Result<BootstrapReport> {
    bootstrap_bias_mse_opts(sx, sy, params, b, seed, &EstimatorOptions::default())
}

pub fn bootstrap_bias_mse_opts(
    sx: &Sample,
    sy: &Sample,
    params: &MeasureParams,
    b: usize,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<BootstrapReport> {
    if b == 0 {
        return Err(Error::InvalidParameter("bootstrap needs B >= 1".into()));
    }
    let lx = exponential_rate(&mle_exponential(sx)?)?;
    let ly = exponential_rate(&mle_exponential(sy)?)?;
    let truth = rcri_two_exponentials(lx, ly, params.alpha, params.beta)?;

    let results: Vec<(f64, usize)> = (0..b)
        .into_par_iter()
        .map(|rep| -> Result<(f64, usize)> {
            let mut redraws = 0usize;
            loop {
                let rx = resample(sx, replicate_seed(seed, "bootstrap", redraws, rep, 0));
                let ry = resample(sy, replicate_seed(seed, "bootstrap", redraws, rep, 1));
                if let (Ok(bx), Ok(by)) = (Sample::new(rx), Sample::new(ry)) {
                    if std_dev(bx.values(), 1) > 0.0 && std_dev(by.values(), 1) > 0.0 {
                        let v = rcri_hat_opts(&bx, &by, params.alpha, params.beta, opts)?;
                        return Ok((v, redraws));
                    }
                }
                redraws += 1;
                if redraws > 64 {
                    return Err(Error::Domain(
                        "bootstrap resampling keeps producing degenerate samples".into(),
                    ));
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let estimates: Vec<f64> = results.iter().map(|r| r.0).collect();
    let degenerate_redraws = results.iter().map(|r| r.1).sum();
    Ok(BootstrapReport {
        report: aggregate("bootstrap", sx.len(), truth, &estimates),
        degenerate_redraws,
    })
}

fn resample(s: &Sample, seed: u64) -> Vec<f64> {
    let v = s.values();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..v.len()).map(|_| v[rng.gen_range(0..v.len())]).collect()
}

/// Asymptotic-normality study: m independent estimates at the first
/// configured sample size, standardized by their own mean and standard
/// deviation.
pub fn normality_study(cfg: &SimConfig, m: usize) -> Result<NormalityReport> {
    cfg.validate()?;
    if m < 1000 {
        return Err(Error::InvalidParameter(
            "normality study needs at least 1000 replicate estimates".into(),
        ));
    }
    let n = cfg.n_values[0];
    let estimates: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|rep| estimate_one(cfg, n, rep))
        .collect::<Result<Vec<f64>>>()?;
    let mut mean = CompensatedSum::new();
    for &v in &estimates {
        mean.add(v);
    }
    let mean = mean.value() / m as f64;
    let sd = std_dev(&estimates, 1);
    if sd <= 0.0 {
        return Err(Error::Domain("estimates have zero variance".into()));
    }
    let standardized: Vec<f64> = estimates.iter().map(|v| (v - mean) / sd).collect();
    let (skewness, excess_kurtosis) = skewness_kurtosis(&standardized);
    Ok(NormalityReport {
        n,
        m,
        skewness,
        excess_kurtosis,
        standardized,
    })
}

/// Fixed-width histogram counts over [lo, hi]; values outside are dropped.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<(f64, usize)> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        if v >= lo && v < hi {
            let idx = ((v - lo) / width) as usize;
            counts[idx.min(bins - 1)] += 1;
        }
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + (i as f64 + 0.5) * width, c))
        .collect()
}
