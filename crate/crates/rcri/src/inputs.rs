//! Parsers for the flat text formats the command line consumes: key=value
//! scenario files, single-column sample files and `start:stop:step` grids.

use std::fs;
use std::path::Path;

use crate::analytic::MeasureParams;
use crate::distributions::{DistributionSpec, Sample};
use crate::error::{Error, Result};
use crate::estimators::EstimatorOptions;
use crate::montecarlo::{SimConfig, TruthRule};

/// A parsed scenario file: the simulation configuration plus the optional
/// age grid that switches the run to the residual measure.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: SimConfig,
    pub t_grid: Vec<f64>,
    /// When set, the run also draws this many estimates at the first n and
    /// reports standardized-moment diagnostics with a histogram.
    pub normality_m: Option<usize>,
}

impl Scenario {
    pub fn is_residual(&self) -> bool {
        !self.t_grid.is_empty()
    }
}

/// Parse a scenario file from a string.
///
/// Recognized keys: `spec_x`, `spec_y` (required, `family:params` syntax),
/// `alpha`, `beta`, `theta`, `t` (comma list of ages), `n` (comma list),
/// `replicates`, `seed`, `truth` (`closed_form` or `quadrature`),
/// `kernel` (`gaussian` or `epanechnikov`), `shared_bandwidth`
/// (`true`/`false`), `scenario` (label override) and `normality_m`
/// (extra sampling-distribution study size). Blank lines and `#`
/// comments are ignored; unknown or duplicate keys are errors.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut spec_x: Option<DistributionSpec> = None;
    let mut spec_y: Option<DistributionSpec> = None;
    let mut alpha = 1.0;
    let mut beta = 1.0;
    let mut theta = 1.0;
    let mut t_grid: Vec<f64> = Vec::new();
    let mut n_values: Option<Vec<usize>> = None;
    let mut replicates: Option<usize> = None;
    let mut seed: Option<u64> = None;
    let mut truth: Option<TruthRule> = None;
    let mut estimator = EstimatorOptions::default();
    let mut label: Option<String> = None;
    let mut normality_m: Option<usize> = None;
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("scenario line {}: expected key=value", idx + 1))
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if seen.contains(&key) {
            return Err(Error::Parse(format!(
                "scenario line {}: duplicate key {key:?}",
                idx + 1
            )));
        }
        let at = |e: Error| Error::Parse(format!("scenario line {}: {e}", idx + 1));
        match key.as_str() {
            "spec_x" => spec_x = Some(value.parse().map_err(at)?),
            "spec_y" => spec_y = Some(value.parse().map_err(at)?),
            "alpha" => alpha = parse_real(value, "alpha").map_err(at)?,
            "beta" => beta = parse_real(value, "beta").map_err(at)?,
            "theta" => theta = parse_real(value, "theta").map_err(at)?,
            "t" => t_grid = parse_real_list(value, "t").map_err(at)?,
            "n" => n_values = Some(parse_count_list(value).map_err(at)?),
            "replicates" => replicates = Some(parse_count(value, "replicates").map_err(at)?),
            "seed" => {
                seed = Some(
                    value
                        .parse()
                        .map_err(|_| at(Error::Parse(format!("bad seed {value:?}"))))?,
                )
            }
            "truth" => truth = Some(parse_truth(value).map_err(at)?),
            "kernel" => estimator.kernel = value.parse().map_err(at)?,
            "shared_bandwidth" => estimator.shared_bandwidth = parse_bool(value).map_err(at)?,
            "scenario" => label = Some(value.to_string()),
            "normality_m" => {
                let m = parse_count(value, "normality_m").map_err(at)?;
                if m == 0 {
                    return Err(at(Error::Parse("normality_m must be positive".into())));
                }
                normality_m = Some(m);
            }
            other => {
                return Err(Error::Parse(format!(
                    "scenario line {}: unknown key {other:?}",
                    idx + 1
                )))
            }
        }
        seen.push(key);
    }

    let spec_x = spec_x.ok_or_else(|| Error::Parse("scenario lacks spec_x".into()))?;
    let spec_y = spec_y.ok_or_else(|| Error::Parse("scenario lacks spec_y".into()))?;
    for &t in &t_grid {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Parse(format!("age t={t} must be finite and >= 0")));
        }
    }

    let params = MeasureParams::new(alpha, beta)?.with_theta(theta)?;
    let mut config = SimConfig::new(spec_x, spec_y, params);
    if let Some(n) = n_values {
        config.n_values = n;
    }
    if let Some(r) = replicates {
        config.replicates = r;
    }
    if let Some(s) = seed {
        config.base_seed = s;
    }
    if let Some(rule) = truth {
        config.truth = rule;
    }
    config.estimator = estimator;
    if let Some(l) = label {
        config.scenario = l;
    }
    config.validate()?;
    Ok(Scenario {
        config,
        t_grid,
        normality_m,
    })
}

/// Read and parse a scenario file from disk.
pub fn read_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// Parse a single-column sample file: one value per line, `#` comments
/// and blank lines ignored.
pub fn parse_sample_text(text: &str) -> Result<Sample> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Parse(format!("sample line {}: bad value {line:?}", idx + 1)))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Parse("sample file contains no values".into()));
    }
    Sample::new(values)
}

/// Read and parse a sample file from disk.
pub fn read_sample_text(path: &Path) -> Result<Sample> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_sample_text(&text)
}

const MAX_GRID_POINTS: usize = 1_000_000;

/// Parse a `start:stop:step` grid into the inclusive point list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "grid {s:?} must look like start:stop:step"
        )));
    }
    let start = parse_real(parts[0], "grid start")?;
    let stop = parse_real(parts[1], "grid stop")?;
    let step = parse_real(parts[2], "grid step")?;
    if step <= 0.0 {
        return Err(Error::Parse(format!("grid step {step} must be > 0")));
    }
    if stop < start {
        return Err(Error::Parse(format!(
            "grid stop {stop} is below start {start}"
        )));
    }
    let span = (stop - start) / step;
    if !span.is_finite() || span > MAX_GRID_POINTS as f64 {
        return Err(Error::Parse(format!("grid {s:?} has too many points")));
    }
    let count = span.round() as usize;
    // Snap to multiples of step so stop lands on the grid when it should.
    let last = if (start + count as f64 * step - stop).abs() <= 1e-9 * step {
        count
    } else {
        span.floor() as usize
    };
    Ok((0..=last).map(|i| start + i as f64 * step).collect())
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn parse_real(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{what} must be finite, got {s:?}")));
    }
    Ok(v)
}

fn parse_real_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|p| parse_real(p, what)).collect()
}

fn parse_count(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} {s:?}")))
}

fn parse_count_list(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(|p| parse_count(p, "n")).collect()
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::Parse(format!(
            "expected true or false, got {other:?}"
        ))),
    }
}

fn parse_truth(s: &str) -> Result<TruthRule> {
    match s.trim().to_ascii_lowercase().as_str() {
        "closed_form" | "closed" => Ok(TruthRule::ClosedForm),
        "quadrature" => Ok(TruthRule::Quadrature),
        other => Err(Error::Parse(format!(
            "unknown truth rule {other:?}, expected closed_form or quadrature"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Kernel;

    const EXAMPLE: &str = "\
# two unit exponentials
spec_x = exponential:1
spec_y = exponential:1
alpha = 1
beta = 1
n = 10,20,30,40,50
replicates = 10000
seed = 20
";

    #[test]
    fn parses_documented_example() {
        let sc = parse_scenario(EXAMPLE).unwrap();
        assert_eq!(sc.config.n_values, vec![10, 20, 30, 40, 50]);
        assert_eq!(sc.config.replicates, 10_000);
        assert_eq!(sc.config.base_seed, 20);
        assert_eq!(sc.config.params.alpha, 1.0);
        assert!(!sc.is_residual());
        assert_eq!(sc.config.truth, TruthRule::ClosedForm);
    }

    #[test]
    fn estimator_and_residual_keys() {
        let text = "spec_x=exponential:1\nspec_y=weibull:5,3\nbeta=2\n\
                    t=0.5\nkernel=epanechnikov\nshared_bandwidth=true\ntruth=quadrature\n";
        let sc = parse_scenario(text).unwrap();
        assert!(sc.is_residual());
        assert_eq!(sc.t_grid, vec![0.5]);
        assert_eq!(sc.config.estimator.kernel, Kernel::Epanechnikov);
        assert!(sc.config.estimator.shared_bandwidth);
        assert_eq!(sc.config.truth, TruthRule::Quadrature);
        assert_eq!(sc.config.params.beta, 2.0);
    }

    #[test]
    fn normality_key_is_optional() {
        assert_eq!(parse_scenario(EXAMPLE).unwrap().normality_m, None);
        let text = format!("{EXAMPLE}normality_m = 500\n");
        assert_eq!(parse_scenario(&text).unwrap().normality_m, Some(500));
        assert!(parse_scenario(&format!("{EXAMPLE}normality_m = 0\n")).is_err());
    }

    #[test]
    fn unknown_duplicate_and_malformed_keys_are_errors() {
        assert!(parse_scenario("spec_x=exponential:1\nspec_y=exponential:1\nbogus=1\n").is_err());
        assert!(parse_scenario("spec_x=exponential:1\nspec_x=exponential:2\n").is_err());
        assert!(parse_scenario("spec_x exponential:1\n").is_err());
        assert!(parse_scenario("spec_y=exponential:1\n").is_err());
        assert!(parse_scenario("spec_x=exponential:1\nspec_y=exponential:1\nt=-1\n").is_err());
    }

    #[test]
    fn sample_file_round_trip() {
        let s = parse_sample_text("# header\n1.5\n0.25\n\n2 # trailing note\n").unwrap();
        assert_eq!(s.values(), &[0.25, 1.5, 2.0]);
        assert!(parse_sample_text("# only comments\n").is_err());
        assert!(parse_sample_text("1.0\noops\n").is_err());
        assert!(parse_sample_text("-1.0\n").is_err());
    }

    #[test]
    fn grid_parsing_hits_endpoints() {
        let g = parse_grid("0:2:0.25").unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 2.0);

        let g = parse_grid("1:1:0.5").unwrap();
        assert_eq!(g, vec![1.0]);

        let g = parse_grid("0:1:0.3").unwrap();
        assert_eq!(g.len(), 4);
        assert!((g[3] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(parse_grid("0:2").is_err());
        assert!(parse_grid("0:2:0").is_err());
        assert!(parse_grid("2:0:0.5").is_err());
        assert!(parse_grid("0:1e9:1e-9").is_err());
        assert!(parse_grid("a:b:c").is_err());
    }
}
