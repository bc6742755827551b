//! The work behind each subcommand: build the result tables and the
//! resolved-configuration record for the manifest.

use std::path::Path;

use serde_json::{json, Value};

use rcri::analytic::{drcri_closed_form, rcri_ph_closed_form, MeasureParams};
use rcri::characterization::{
    check_constant_drcri, check_hazard_reciprocal, check_linear_drcri, check_mrl_proportional,
    CharacterizationVerdict, Property,
};
use rcri::distributions::DistributionSpec;
use rcri::error::{Error, Result};
use rcri::estimators::{build_estimates, EstimatorOptions, Kernel};
use rcri::inputs::{parse_grid, read_sample_text, read_scenario};
use rcri::montecarlo::{
    histogram, normality_study, run_bias_mse, run_drcri_bias_mse, SimReport, TruthRule,
};
use rcri::numerics::ks_distance_standard_normal;
use rcri::photometry::{
    band_bootstrap, band_rcri_table_with, parse_epoch_csv, parse_pairs, BandMethod,
};
use rcri::quadrature::{
    drcri_quadrature_opts, integrate_survival_product_opts, QuadratureOptions, SurvivalCurve,
};

use crate::output::{cell, Table};

pub struct CommandOutput {
    pub tables: Vec<Table>,
    pub config: Value,
    pub seeds: Vec<u64>,
}

pub fn analytic(
    spec: &str,
    alpha: f64,
    beta: f64,
    theta: f64,
    t: f64,
    quad: &QuadratureOptions,
) -> Result<CommandOutput> {
    let spec: DistributionSpec = spec.parse()?;
    let params = MeasureParams::new(alpha, beta)?
        .with_theta(theta)?
        .with_t(t)?;

    let closed = if params.t > 0.0 {
        match spec.ph_power(params.theta) {
            Some(ph) => drcri_closed_form(&spec, &ph, &params),
            None => Err(Error::NoClosedForm {
                family: spec.family_name().to_string(),
                hint: "no proportional-hazards closure".into(),
            }),
        }
    } else {
        rcri_ph_closed_form(&spec, &params)
    };
    let (route, value) = match closed {
        Ok(v) => ("closed_form", v),
        Err(Error::NoClosedForm { .. }) => {
            let sx = SurvivalCurve::from_spec(&spec);
            let sy = SurvivalCurve::ph_of_spec(&spec, params.theta)?;
            let v = if params.t > 0.0 {
                drcri_quadrature_opts(&sx, &sy, params.alpha, params.beta, params.t, quad)?
            } else {
                integrate_survival_product_opts(&sx, &sy, params.alpha, params.beta, 0.0, quad)?.0
            };
            ("quadrature", v)
        }
        Err(e) => return Err(e),
    };

    let mut table = Table::new(
        "analytic",
        vec!["spec", "theta", "alpha", "beta", "t", "route", "value"],
    );
    table.push(vec![
        spec.label(),
        cell(params.theta),
        cell(params.alpha),
        cell(params.beta),
        cell(params.t),
        route.to_string(),
        cell(value),
    ]);

    let config = json!({
        "spec": spec.label(),
        "alpha": params.alpha,
        "beta": params.beta,
        "theta": params.theta,
        "t": params.t,
        "route": route,
        "abs_tol": quad.abs_tol,
        "rel_tol": quad.rel_tol,
        "tail_ceiling": quad.tail_ceiling,
    });
    Ok(CommandOutput {
        tables: vec![table],
        config,
        seeds: Vec::new(),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn estimate(
    x: &Path,
    y: &Path,
    alpha: f64,
    beta: f64,
    t: f64,
    kernel: &str,
    shared_bandwidth: bool,
    quad: &QuadratureOptions,
) -> Result<CommandOutput> {
    let kernel: Kernel = kernel.parse()?;
    let params = MeasureParams::new(alpha, beta)?.with_t(t)?;
    let sx = read_sample_text(x)?;
    let sy = read_sample_text(y)?;
    let opts = EstimatorOptions {
        kernel,
        shared_bandwidth,
    };
    let (ex, ey) = build_estimates(&sx, &sy, &opts)?;
    let cx = ex.survival_curve()?;
    let cy = ey.survival_curve()?;
    let value = if params.t > 0.0 {
        drcri_quadrature_opts(&cx, &cy, params.alpha, params.beta, params.t, quad)?
    } else {
        integrate_survival_product_opts(&cx, &cy, params.alpha, params.beta, 0.0, quad)?.0
    };

    let mut table = Table::new(
        "estimate",
        vec![
            "n_x",
            "n_y",
            "kernel",
            "shared_bandwidth",
            "bandwidth_x",
            "bandwidth_y",
            "alpha",
            "beta",
            "t",
            "estimate",
        ],
    );
    table.push(vec![
        sx.len().to_string(),
        sy.len().to_string(),
        kernel.name().to_string(),
        shared_bandwidth.to_string(),
        cell(ex.bandwidth()),
        cell(ey.bandwidth()),
        cell(params.alpha),
        cell(params.beta),
        cell(params.t),
        cell(value),
    ]);

    let config = json!({
        "x": x.display().to_string(),
        "y": y.display().to_string(),
        "alpha": params.alpha,
        "beta": params.beta,
        "t": params.t,
        "kernel": kernel.name(),
        "shared_bandwidth": shared_bandwidth,
        "abs_tol": quad.abs_tol,
        "rel_tol": quad.rel_tol,
        "tail_ceiling": quad.tail_ceiling,
    });
    Ok(CommandOutput {
        tables: vec![table],
        config,
        seeds: Vec::new(),
    })
}

pub fn simulate(path: &Path) -> Result<CommandOutput> {
    let sc = read_scenario(path)?;
    let reports = if sc.is_residual() {
        run_drcri_bias_mse(&sc.config, &sc.t_grid)?
    } else {
        run_bias_mse(&sc.config)?
    };

    let mut table = Table::new("simulate", vec!["scenario", "n", "bias", "mse", "truth"]);
    for r in &reports {
        table.push(report_row(r));
    }
    let mut tables = vec![table];

    if let Some(m) = sc.normality_m {
        let study = normality_study(&sc.config, m)?;
        let ks = ks_distance_standard_normal(&study.standardized);
        let mut summary = Table::new(
            "normality",
            vec!["n", "m", "skewness", "excess_kurtosis", "ks_distance"],
        );
        summary.push(vec![
            study.n.to_string(),
            study.m.to_string(),
            cell(study.skewness),
            cell(study.excess_kurtosis),
            cell(ks),
        ]);
        tables.push(summary);

        let bins = histogram(&study.standardized, 40, -4.0, 4.0);
        let mut hist = Table::new("histogram", vec!["z", "count"]);
        for (center, count) in bins {
            hist.push(vec![cell(center), count.to_string()]);
        }
        tables.push(hist);
    }

    let cfg = &sc.config;
    let config = json!({
        "scenario_file": path.display().to_string(),
        "scenario": cfg.scenario,
        "spec_x": cfg.spec_x.label(),
        "spec_y": cfg.spec_y.label(),
        "alpha": cfg.params.alpha,
        "beta": cfg.params.beta,
        "theta": cfg.params.theta,
        "t_grid": sc.t_grid,
        "n": cfg.n_values,
        "replicates": cfg.replicates,
        "seed": cfg.base_seed,
        "truth": truth_name(cfg.truth),
        "kernel": cfg.estimator.kernel.name(),
        "shared_bandwidth": cfg.estimator.shared_bandwidth,
        "normality_m": sc.normality_m,
    });
    Ok(CommandOutput {
        tables,
        config,
        seeds: vec![cfg.base_seed],
    })
}

fn report_row(r: &SimReport) -> Vec<String> {
    vec![
        r.scenario.clone(),
        r.n.to_string(),
        cell(r.bias),
        cell(r.mse),
        cell(r.truth_value),
    ]
}

fn truth_name(rule: TruthRule) -> &'static str {
    match rule {
        TruthRule::ClosedForm => "closed_form",
        TruthRule::Quadrature => "quadrature",
    }
}

pub fn characterize(
    spec: &str,
    theta: f64,
    alpha: f64,
    beta: f64,
    grid: &str,
    property: &str,
) -> Result<CommandOutput> {
    let spec: DistributionSpec = spec.parse()?;
    let property: Property = property.parse()?;
    let t_grid = parse_grid(grid)?;
    let params = MeasureParams::new(alpha, beta)?.with_theta(theta)?;

    let verdict = match property {
        Property::ConstantDrcri => {
            let sx = SurvivalCurve::from_spec(&spec);
            let sy = SurvivalCurve::ph_of_spec(&spec, theta)?;
            check_constant_drcri(&sx, &sy, alpha, beta, &t_grid)?
        }
        Property::LinearDrcri => check_linear_drcri(&spec, &params, &t_grid)?,
        Property::HazardReciprocal => check_hazard_reciprocal(&spec, &params, &t_grid)?,
        Property::MrlProportional => check_mrl_proportional(&spec, &params, &t_grid)?,
    };

    let config = json!({
        "spec": spec.label(),
        "theta": theta,
        "alpha": alpha,
        "beta": beta,
        "grid": grid,
        "property": verdict.property.name(),
    });
    Ok(CommandOutput {
        tables: verdict_tables(&verdict),
        config,
        seeds: Vec::new(),
    })
}

fn verdict_tables(v: &CharacterizationVerdict) -> Vec<Table> {
    let mut verdict = Table::new(
        "verdict",
        vec!["property", "holds", "fit_residual", "level"],
    );
    verdict.push(vec![
        v.property.name().to_string(),
        v.holds.to_string(),
        cell(v.fit_residual),
        cell(v.level),
    ]);
    let mut grid = Table::new("grid", vec!["t", "value"]);
    for (t, val) in v.t_grid.iter().zip(&v.values) {
        grid.push(vec![cell(*t), cell(*val)]);
    }
    vec![verdict, grid]
}

#[allow(clippy::too_many_arguments)]
pub fn photometry(
    input: &Path,
    source: Option<&str>,
    pairs: &str,
    alpha: f64,
    beta: f64,
    method: &str,
    bootstrap: Option<usize>,
    seed: u64,
) -> Result<CommandOutput> {
    let method: BandMethod = method.parse()?;
    let pairs = parse_pairs(pairs)?;
    let parsed = parse_epoch_csv(input, source)?;
    if parsed.skipped > 0 {
        eprintln!("skipped {} malformed rows", parsed.skipped);
    }

    let mut table = band_rcri_table_with(&parsed.records, &pairs, alpha, beta, method)?;
    if let Some(b) = bootstrap {
        for row in &mut table.rows {
            let rep = band_bootstrap(&parsed.records, row.pair, alpha, beta, b, seed)?;
            row.bias = Some(rep.report.bias);
            row.mse = Some(rep.report.mse);
            if rep.degenerate_redraws > 0 {
                eprintln!(
                    "pair {}: {} degenerate resamples redrawn",
                    row.pair, rep.degenerate_redraws
                );
            }
        }
    }

    let mut out = Table::new("photometry", vec!["pair", "rcri", "bias", "mse"]);
    for row in &table.rows {
        out.push(vec![
            row.pair.to_string(),
            cell(row.rcri),
            row.bias.map(cell).unwrap_or_default(),
            row.mse.map(cell).unwrap_or_default(),
        ]);
    }

    let config = json!({
        "input": input.display().to_string(),
        "source": source,
        "pairs": pairs.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "alpha": alpha,
        "beta": beta,
        "method": match method { BandMethod::Parametric => "parametric", BandMethod::Kernel => "kernel" },
        "bootstrap": bootstrap,
        "seed": seed,
        "skipped_rows": parsed.skipped,
    });
    let seeds = if bootstrap.is_some() {
        vec![seed]
    } else {
        Vec::new()
    };
    Ok(CommandOutput {
        tables: vec![out],
        config,
        seeds,
    })
}

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

pub fn selftest(quad: &QuadratureOptions) -> Result<CommandOutput> {
    let mut checks = Vec::new();
    closed_form_sweep(quad, &mut checks)?;
    characterization_witnesses(&mut checks)?;

    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.ok)
        .map(|c| c.name.as_str())
        .collect();
    if !failed.is_empty() {
        return Err(Error::Domain(format!(
            "selftest failed: {}",
            failed.join(", ")
        )));
    }

    let mut table = Table::new("selftest", vec!["check", "ok", "detail"]);
    for c in checks {
        table.push(vec![c.name, c.ok.to_string(), c.detail]);
    }
    Ok(CommandOutput {
        tables: vec![table],
        config: json!({ "abs_tol": quad.abs_tol, "rel_tol": quad.rel_tol }),
        seeds: Vec::new(),
    })
}

// 64-bit LCG; draws in [0,1) are plenty for parameter sweeps.
struct Lcg(u64);

impl Lcg {
    fn next_unit(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

type MakeSpec = fn(&mut Lcg, f64) -> Result<DistributionSpec>;

fn closed_form_sweep(quad: &QuadratureOptions, checks: &mut Vec<Check>) -> Result<()> {
    let mut rng = Lcg(0x00c0ffee);
    let families: [(&str, MakeSpec); 6] = [
        ("uniform", |r, _| {
            DistributionSpec::uniform(r.range(0.5, 3.0))
        }),
        ("exponential", |r, _| {
            DistributionSpec::exponential(r.range(0.3, 3.0))
        }),
        ("weibull", |r, _| {
            DistributionSpec::weibull(r.range(0.3, 3.0), r.range(0.5, 3.0))
        }),
        // Power tails need exponent >= 2.2 or the truncated quadrature
        // cannot certify the tolerance and refuses.
        ("gpd", |r, s| {
            let hi = if s >= 2.2 {
                1.5
            } else {
                (s / (2.2 - s)).min(1.5)
            };
            DistributionSpec::gpd(r.range(0.2, hi), r.range(0.5, 2.0))
        }),
        ("pareto_i", |r, s| {
            DistributionSpec::pareto_i(r.range(0.5, 2.0), (2.2 + 2.0 * r.next_unit()) / s)
        }),
        ("pareto_ii", |r, s| {
            DistributionSpec::pareto_ii(r.range(0.5, 2.0), (2.2 + 2.0 * r.next_unit()) / s)
        }),
    ];

    for (name, make) in families {
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let alpha = rng.range(0.5, 2.0);
            let beta = rng.range(0.5, 2.0);
            let theta = rng.range(0.5, 2.0);
            let s = alpha + beta * theta;
            let spec = make(&mut rng, s)?;
            let params = MeasureParams::new(alpha, beta)?.with_theta(theta)?;
            let closed = rcri_ph_closed_form(&spec, &params)?;
            let sx = SurvivalCurve::from_spec(&spec);
            let sy = SurvivalCurve::ph_of_spec(&spec, theta)?;
            let (q, _) = integrate_survival_product_opts(&sx, &sy, alpha, beta, 0.0, quad)?;
            worst = worst.max(((closed - q) / closed).abs());
        }
        checks.push(Check {
            name: format!("closed_form_vs_quadrature:{name}"),
            ok: worst <= 1e-6,
            detail: format!("max rel diff {worst:.3e}"),
        });
    }
    Ok(())
}

fn characterization_witnesses(checks: &mut Vec<Check>) -> Result<()> {
    let grid = parse_grid("0:2:0.25")?;
    let exp1 = DistributionSpec::exponential(1.0)?;
    let exp_half = DistributionSpec::exponential(0.5)?;
    let gpd = DistributionSpec::gpd(0.5, 2.0)?;
    let gpd_small = DistributionSpec::gpd(0.5, 1.0)?;
    let weibull = DistributionSpec::weibull(1.0, 3.0)?;
    let p2 = MeasureParams::new(1.0, 1.0)?.with_theta(2.0)?;

    let v = check_constant_drcri(
        &SurvivalCurve::from_spec(&exp1),
        &SurvivalCurve::from_spec(&exp_half),
        1.0,
        1.0,
        &grid,
    )?;
    checks.push(Check {
        name: "constant_holds_for_exponential_pair".into(),
        ok: v.holds,
        detail: format!("relative spread {:.3e}", v.fit_residual),
    });

    let v = check_constant_drcri(
        &SurvivalCurve::from_spec(&exp1),
        &SurvivalCurve::from_spec(&gpd_small),
        1.0,
        1.0,
        &grid,
    )?;
    checks.push(Check {
        name: "constant_fails_for_exponential_gpd".into(),
        ok: !v.holds && v.fit_residual > 1e-2,
        detail: format!("relative spread {:.3e}", v.fit_residual),
    });

    let v = check_linear_drcri(&gpd, &p2, &grid)?;
    checks.push(Check {
        name: "linear_holds_for_gpd".into(),
        ok: v.holds && v.level > 0.0,
        detail: format!("1-r2 {:.3e}, slope {:.4}", v.fit_residual, v.level),
    });

    let v = check_linear_drcri(&weibull, &p2, &grid)?;
    checks.push(Check {
        name: "linear_fails_for_weibull_shape_3".into(),
        ok: !v.holds && v.fit_residual > 1e-4,
        detail: format!("1-r2 {:.3e}", v.fit_residual),
    });

    let v = check_hazard_reciprocal(&gpd, &p2, &grid)?;
    checks.push(Check {
        name: "hazard_product_constant_on_gpd".into(),
        ok: v.holds,
        detail: format!("cov {:.3e}", v.fit_residual),
    });

    let v = check_mrl_proportional(&gpd, &p2, &grid)?;
    checks.push(Check {
        name: "mrl_ratio_constant_on_gpd".into(),
        ok: v.holds,
        detail: format!("cov {:.3e}", v.fit_residual),
    });
    Ok(())
}
