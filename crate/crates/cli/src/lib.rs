//! Command implementations behind the `pl-lab` binary.
//!
//! Every command returns an [`Outcome`] holding the exit code and the text
//! destined for stdout; errors become exit code 1 in `main`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use pl_lab_core::certify::{
    conditioning_report, estimate_constant, linspace_value, sandwich_report, submetric_report,
    CertificationReport, SamplingPlan, SubgradientOracle, Verdict,
};
use pl_lab_core::funclib::{Function, PowerDistance};
use pl_lab_core::proxflow::{
    finite_length_certificate, prox_sequence, FiniteLengthCertificate, ProxTrace, DEFAULT_STEP_TOL,
};
use pl_lab_core::setlib::{ClosedSet, Point};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

pub fn verdict_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Holds => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- certify

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyName {
    Pl,
    PLoja,
    Conditioning,
    Submetric,
    Sandwich,
}

/// Which subgradients feed the norm-based checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgradientMode {
    #[default]
    Limiting,
    Clarke,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    pub function: Function,
    pub property: PropertyName,
    /// Exponent; defaults to 2.
    #[serde(default)]
    pub p: Option<f64>,
    /// Claimed constant (`mu`). Required except for `pl` and `p-loja`.
    #[serde(default)]
    pub claimed: Option<f64>,
    /// Upper constant `L` of the sandwich check.
    #[serde(default, alias = "L")]
    pub smoothness: Option<f64>,
    pub plan: SamplingPlan,
    #[serde(default)]
    pub subgradients: SubgradientMode,
}

fn oracle_for(config: &CertifyConfig) -> anyhow::Result<SubgradientOracle> {
    let dim = config.function.dim().unwrap_or_else(|| config.plan.dim());
    match (config.subgradients, &config.function) {
        (SubgradientMode::Limiting, f) => Ok(SubgradientOracle::function(f, dim)?),
        (SubgradientMode::Clarke, Function::PowerDistance(f)) => Ok(SubgradientOracle::clarke(f)),
        (SubgradientMode::Clarke, Function::Smooth(_)) => {
            bail!("clarke subgradients are only available for power_distance functions")
        }
    }
}

pub fn run_certify(config: &CertifyConfig) -> anyhow::Result<CertificationReport> {
    let oracle = oracle_for(config)?;
    let p = config.p.unwrap_or(2.0);
    let claimed = || {
        config
            .claimed
            .with_context(|| format!("property {:?} needs a claimed constant", config.property))
    };
    let report = match config.property {
        PropertyName::Pl => {
            if p != 2.0 {
                bail!("property pl is the p = 2 case; use p-loja for p = {p}");
            }
            estimate_constant(&oracle, 2.0, &config.plan, config.claimed)?
        }
        PropertyName::PLoja => estimate_constant(&oracle, p, &config.plan, config.claimed)?,
        PropertyName::Conditioning => conditioning_report(&oracle, p, claimed()?, &config.plan)?,
        PropertyName::Submetric => submetric_report(&oracle, p, claimed()?, &config.plan)?,
        PropertyName::Sandwich => {
            let l = config
                .smoothness
                .context("property sandwich needs smoothness (L)")?;
            sandwich_report(&oracle, claimed()?, l, &config.plan)?
        }
    };
    Ok(report)
}

pub fn cmd_certify(config_path: &Path) -> anyhow::Result<Outcome> {
    let config: CertifyConfig = read_json(config_path)?;
    let report = run_certify(&config)?;
    Ok(Outcome {
        code: verdict_code(report.verdict),
        stdout: to_json(&report),
    })
}

// ------------------------------------------------------------------- prox

fn default_max_iter() -> usize {
    200
}

fn default_tol() -> f64 {
    DEFAULT_STEP_TOL
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProxConfig {
    pub function: Function,
    pub x0: Point,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Where to write the CSV trace.
    #[serde(default)]
    pub trace_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProxOutput {
    pub certificate: FiniteLengthCertificate,
    pub trace: ProxTrace,
}

pub fn run_prox(config: &ProxConfig) -> anyhow::Result<ProxOutput> {
    let Function::PowerDistance(f) = &config.function else {
        bail!("prox needs a power_distance function");
    };
    let trace = prox_sequence(f, &config.x0, config.max_iter, config.tol)?;
    let certificate = finite_length_certificate(&trace, f, &config.x0)?;
    Ok(ProxOutput { certificate, trace })
}

pub fn cmd_prox(config_path: &Path, trace_out: Option<&Path>) -> anyhow::Result<Outcome> {
    let config: ProxConfig = read_json(config_path)?;
    let output = run_prox(&config)?;
    if let Some(path) = trace_out.or(config.trace_csv.as_deref()) {
        fs::write(path, output.trace.to_csv())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Outcome {
        code: verdict_code(output.certificate.report.verdict),
        stdout: to_json(&output),
    })
}

// ----------------------------------------------------------------- figure

/// Values of `f` on a `resolution x resolution` grid over `[lo, hi]^2`, as
/// CSV with header `x1,x2,f`. Rows run over `x1` first, then `x2`.
pub fn figure_csv(
    f: &PowerDistance,
    lo: f64,
    hi: f64,
    resolution: usize,
) -> anyhow::Result<String> {
    if f.dim() != 2 {
        bail!("figure needs a set in R^2, got dimension {}", f.dim());
    }
    if resolution < 2 {
        bail!("resolution must be at least 2, got {resolution}");
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        bail!("bounds must satisfy LO < HI, got {lo},{hi}");
    }
    let mut out = String::from("x1,x2,f\n");
    for j in 0..resolution {
        let x2 = linspace_value(lo, hi, resolution, j);
        for i in 0..resolution {
            let x1 = linspace_value(lo, hi, resolution, i);
            let value = f.value(&Point::new(vec![x1, x2])?)?;
            out.push_str(&format!("{x1},{x2},{value}\n"));
        }
    }
    Ok(out)
}

/// Parses `LO,HI`.
pub fn parse_bounds(text: &str) -> anyhow::Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once(',')
        .with_context(|| format!("bounds must look like LO,HI, got {text:?}"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

pub fn cmd_figure(
    set_path: &Path,
    mu: f64,
    p: f64,
    bounds: (f64, f64),
    resolution: usize,
    out: &Path,
) -> anyhow::Result<Outcome> {
    let set: ClosedSet = read_json(set_path)?;
    let f = PowerDistance::new(set, p, mu)?;
    let csv = figure_csv(&f, bounds.0, bounds.1, resolution)?;
    fs::write(out, csv).with_context(|| format!("writing {}", out.display()))?;
    Ok(Outcome {
        code: EXIT_OK,
        stdout: String::new(),
    })
}

// --------------------------------------------------------- counterexample

/// `f = d^2 / 2` to the unit circle, inspected at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub gap_at_origin: f64,
    pub limiting_min_norm: f64,
    pub clarke_min_norm: f64,
    pub pl_limiting_holds_with_mu_1: bool,
    pub pl_clarke_holds: bool,
}

pub fn counterexample() -> anyhow::Result<Counterexample> {
    let f = PowerDistance::half_squared(ClosedSet::unit_circle(), 1.0)?;
    let origin = Point::zeros(2);
    let plan = SamplingPlan::square_grid(-2.0, 2.0, 101);
    let limiting = SubgradientOracle::power_distance(&f);
    let clarke = SubgradientOracle::clarke(&f);
    Ok(Counterexample {
        gap_at_origin: limiting.gap(&origin)?,
        limiting_min_norm: f
            .limiting_subdiff(&origin)?
            .min_norm()
            .context("empty limiting subdifferential")?,
        clarke_min_norm: f.clarke_min_norm(&origin)?.min_norm,
        pl_limiting_holds_with_mu_1: estimate_constant(&limiting, 2.0, &plan, Some(1.0))?.holds(),
        pl_clarke_holds: estimate_constant(&clarke, 2.0, &plan, None)?.holds(),
    })
}

pub fn cmd_counterexample() -> anyhow::Result<Outcome> {
    Ok(Outcome {
        code: EXIT_OK,
        stdout: to_json(&counterexample()?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_parse_with_negatives() {
        assert_eq!(parse_bounds("-2,2").unwrap(), (-2.0, 2.0));
        assert_eq!(parse_bounds(" -1.5 , 0.5").unwrap(), (-1.5, 0.5));
        assert!(parse_bounds("3").is_err());
        assert!(parse_bounds("a,b").is_err());
    }

    #[test]
    fn counterexample_values() {
        let c = counterexample().unwrap();
        assert_eq!(c.gap_at_origin, 0.5);
        assert_eq!(c.limiting_min_norm, 1.0);
        assert_eq!(c.clarke_min_norm, 0.0);
        assert!(c.pl_limiting_holds_with_mu_1);
        assert!(!c.pl_clarke_holds);
    }

    #[test]
    fn figure_layout() {
        let f = PowerDistance::half_squared(ClosedSet::parabola(1.0).unwrap(), 1.0).unwrap();
        let csv = figure_csv(&f, -1.0, 1.0, 3).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "x1,x2,f");
        assert_eq!(rows.len(), 10);
        assert!(rows[1].starts_with("-1,-1,"));
        assert!(rows[2].starts_with("0,-1,"));
        assert!(rows[4].starts_with("-1,0,"));
        assert_eq!(rows[5], "0,0,0");
        assert!(figure_csv(&f, -1.0, 1.0, 1).is_err());
        assert!(figure_csv(&f, 1.0, -1.0, 3).is_err());
    }

    #[test]
    fn certify_config_parses_and_runs() {
        let text = r#"{
            "function": {"kind": "power_norm", "mu": 1.0, "p": 2.0},
            "property": "pl",
            "claimed": 1.0,
            "plan": {"mode": "grid", "bounds": [[-1, 1], [-1, 1]], "points_per_axis": 5}
        }"#;
        let config: CertifyConfig = serde_json::from_str(text).unwrap();
        let report = run_certify(&config).unwrap();
        assert_eq!(report.verdict, Verdict::Holds);
    }

    #[test]
    fn clarke_mode_rejects_smooth_functions() {
        let text = r#"{
            "function": {"kind": "power_norm", "mu": 1.0, "p": 2.0},
            "property": "pl",
            "subgradients": "clarke",
            "plan": {"mode": "grid", "bounds": [[-1, 1]], "points_per_axis": 5}
        }"#;
        let config: CertifyConfig = serde_json::from_str(text).unwrap();
        assert!(run_certify(&config).is_err());
    }

    #[test]
    fn pl_rejects_other_exponents() {
        let text = r#"{
            "function": {"kind": "power_norm", "mu": 1.0, "p": 3.0},
            "property": "pl",
            "p": 3.0,
            "plan": {"mode": "grid", "bounds": [[-1, 1]], "points_per_axis": 5}
        }"#;
        let config: CertifyConfig = serde_json::from_str(text).unwrap();
        assert!(run_certify(&config).is_err());
    }

    #[test]
    fn prox_needs_power_distance() {
        let text = r#"{"function": {"kind": "power_norm", "mu": 1.0, "p": 2.0}, "x0": [1.0]}"#;
        let config: ProxConfig = serde_json::from_str(text).unwrap();
        assert!(run_prox(&config).is_err());
    }
}
