//! Sampling-based estimation and verification of Lojasiewicz-type
//! inequalities.
//!
//! All five properties are checked sample by sample. Each report carries the
//! infimum of the per-sample constant, the extremal sample, and a verdict
//! that only means "no counterexample among the samples". The infimum
//! `inf f` is always supplied by the oracle, never estimated.
//!
//! Samples are evaluated in parallel; the reduction walks them in plan order
//! and breaks ties by lexicographically smallest point, so reports do not
//! depend on scheduling.

mod oracle;
mod plan;
mod report;

use rayon::prelude::*;

pub use oracle::SubgradientOracle;
pub use plan::{linspace_value, SamplingMode, SamplingPlan, DEFAULT_EXCLUSION_RADIUS};
pub use report::{extended_real, CertificationReport, Property, Verdict};

use crate::funclib::{check_exponent, conjugate_exponent};
use crate::setlib::Point;
use crate::{Error, Result};

/// Relative tolerance when comparing an estimated constant with a claim.
pub const CONSTANT_REL_TOL: f64 = 1e-6;

/// Per-sample slack: an inequality `lhs <= rhs` is violated when
/// `lhs - rhs > INEQUALITY_TOL * (1 + |scale|)`.
pub const INEQUALITY_TOL: f64 = 1e-9;

/// Largest `mu` such that the p-Lojasiewicz inequality
/// `f(x) - inf f <= |x*|^q / (q mu^{q/p})` holds at `x` for every sampled
/// subgradient.
///
/// Uses the minimum-norm witness. Returns `+inf` when `f(x) = inf f` and `0`
/// when a zero subgradient coexists with a positive gap.
pub fn loja_ratio(oracle: &SubgradientOracle, p: f64, x: &Point) -> Result<f64> {
    check_exponent(p)?;
    let gap = oracle.gap(x)?;
    let sample = oracle.subgradients(x)?;
    let m = sample.min_norm().ok_or(Error::EmptyWitnessSet)?;
    Ok(ratio_from(p, gap, m))
}

fn ratio_from(p: f64, gap: f64, min_norm: f64) -> f64 {
    if gap <= 0.0 {
        return f64::INFINITY;
    }
    if min_norm == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        return min_norm * min_norm / (2.0 * gap);
    }
    let q = conjugate_exponent(p);
    // (m^q / (q gap))^{p/q} computed in logs to avoid overflow
    ((q * min_norm.ln() - (q * gap).ln()) * (p / q)).exp()
}

/// Per-sample outcome after exclusion.
struct Outcome {
    point: Point,
    ratio: f64,
    /// `lhs - rhs - allowance`; positive means violated.
    excess: f64,
}

fn pick<'a>(
    outcomes: impl Iterator<Item = &'a Outcome>,
    key: impl Fn(&Outcome) -> f64,
    minimize: bool,
) -> Option<&'a Outcome> {
    let mut best: Option<&Outcome> = None;
    for o in outcomes {
        let better = match best {
            None => true,
            Some(b) => {
                let (k, kb) = (key(o), key(b));
                let strictly = if minimize { k < kb } else { k > kb };
                strictly || (k == kb && o.point.lex_cmp(&b.point).is_lt())
            }
        };
        if better {
            best = Some(o);
        }
    }
    best
}

fn evaluate<F>(points: &[Point], f: F) -> Result<Vec<Outcome>>
where
    F: Fn(&Point) -> Result<Option<(f64, f64)>> + Sync,
{
    let evaluated: Vec<Option<Outcome>> = points
        .par_iter()
        .map(|x| {
            Ok(f(x)?.map(|(ratio, excess)| Outcome {
                point: x.clone(),
                ratio,
                excess,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(evaluated.into_iter().flatten().collect())
}

fn check_plan(oracle: &SubgradientOracle, plan: &SamplingPlan) -> Result<Vec<Point>> {
    if plan.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            found: plan.dim(),
        });
    }
    plan.points()
}

fn excluded(oracle: &SubgradientOracle, x: &Point, radius: f64) -> Result<bool> {
    match oracle.argmin() {
        Some(set) if radius > 0.0 => Ok(set.distance(x)? < radius),
        _ => Ok(false),
    }
}

/// Builds a report from per-sample outcomes whose `excess` decides the
/// verdict.
fn inequality_report(
    property: Property,
    claimed: Option<f64>,
    outcomes: &[Outcome],
) -> CertificationReport {
    let estimated = outcomes
        .iter()
        .map(|o| o.ratio)
        .fold(f64::INFINITY, f64::min);
    let worst = pick(outcomes.iter(), |o| o.excess, false);
    let (verdict, witness) = match worst {
        None => (Verdict::Inconclusive, None),
        Some(w) if w.excess > 0.0 => (Verdict::Violated, Some(w.point.clone())),
        Some(_) => (
            Verdict::Holds,
            pick(outcomes.iter(), |o| o.ratio, true).map(|o| o.point.clone()),
        ),
    };
    CertificationReport {
        property,
        estimated_constant: estimated,
        claimed_constant: claimed,
        verdict,
        witness,
        samples_used: outcomes.len(),
        tolerance: INEQUALITY_TOL,
    }
}

/// Estimates the global p-Lojasiewicz constant (PL when `p = 2`) as the
/// infimum of [`loja_ratio`] over the plan, and compares it with `claimed`
/// at relative tolerance [`CONSTANT_REL_TOL`].
///
/// Without a claim the verdict is `Holds` iff the estimate is positive.
pub fn estimate_constant(
    oracle: &SubgradientOracle,
    p: f64,
    plan: &SamplingPlan,
    claimed: Option<f64>,
) -> Result<CertificationReport> {
    check_exponent(p)?;
    let points = check_plan(oracle, plan)?;
    let outcomes = evaluate(&points, |x| {
        if excluded(oracle, x, plan.exclusion_radius)? {
            return Ok(None);
        }
        Ok(Some((loja_ratio(oracle, p, x)?, 0.0)))
    })?;
    let property = if p == 2.0 {
        Property::Pl
    } else {
        Property::PLojasiewicz { p }
    };
    let best = pick(outcomes.iter(), |o| o.ratio, true);
    let estimated = best.map_or(f64::INFINITY, |o| o.ratio);
    let verdict = match (best, claimed) {
        (None, _) => Verdict::Inconclusive,
        (Some(_), Some(c)) if estimated >= c * (1.0 - CONSTANT_REL_TOL) => Verdict::Holds,
        (Some(_), Some(_)) => Verdict::Violated,
        (Some(_), None) if estimated > 0.0 => Verdict::Holds,
        (Some(_), None) => Verdict::Violated,
    };
    Ok(CertificationReport {
        property,
        estimated_constant: estimated,
        claimed_constant: claimed,
        verdict,
        witness: best.map(|o| o.point.clone()),
        samples_used: outcomes.len(),
        tolerance: CONSTANT_REL_TOL,
    })
}

fn argmin_distance(oracle: &SubgradientOracle, x: &Point) -> Result<f64> {
    oracle.argmin().ok_or(Error::MissingArgmin)?.distance(x)
}

/// Global p-conditioning: `(mu/p) d_argmin(x)^p <= f(x) - inf f`.
///
/// The estimate is the infimum of `p (f - inf f) / d_argmin^p`.
pub fn conditioning_report(
    oracle: &SubgradientOracle,
    p: f64,
    claimed: f64,
    plan: &SamplingPlan,
) -> Result<CertificationReport> {
    check_exponent(p)?;
    oracle.argmin().ok_or(Error::MissingArgmin)?;
    let points = check_plan(oracle, plan)?;
    let outcomes = evaluate(&points, |x| {
        let d = argmin_distance(oracle, x)?;
        if d < plan.exclusion_radius {
            return Ok(None);
        }
        let value = oracle.value(x)?;
        let gap = value - oracle.infimum();
        let dp = d.powf(p);
        let ratio = if dp > 0.0 {
            p * gap / dp
        } else {
            f64::INFINITY
        };
        let excess = claimed / p * dp - gap - INEQUALITY_TOL * (1.0 + value.abs());
        Ok(Some((ratio, excess)))
    })?;
    Ok(inequality_report(
        Property::Conditioning { p },
        Some(claimed),
        &outcomes,
    ))
}

/// Global p-submetric regularity: `mu d_argmin(x)^{p-1} <= |x*|` for the
/// minimum-norm witness.
pub fn submetric_report(
    oracle: &SubgradientOracle,
    p: f64,
    claimed: f64,
    plan: &SamplingPlan,
) -> Result<CertificationReport> {
    check_exponent(p)?;
    oracle.argmin().ok_or(Error::MissingArgmin)?;
    let points = check_plan(oracle, plan)?;
    let outcomes = evaluate(&points, |x| {
        let d = argmin_distance(oracle, x)?;
        if d < plan.exclusion_radius {
            return Ok(None);
        }
        let m = oracle
            .subgradients(x)?
            .min_norm()
            .ok_or(Error::EmptyWitnessSet)?;
        let dq = d.powf(p - 1.0);
        let ratio = if dq > 0.0 { m / dq } else { f64::INFINITY };
        let excess = claimed * dq - m - INEQUALITY_TOL * (1.0 + m);
        Ok(Some((ratio, excess)))
    })?;
    Ok(inequality_report(
        Property::SubmetricRegularity { p },
        Some(claimed),
        &outcomes,
    ))
}

/// Two-sided growth `(mu/2) d^2 <= f - inf f <= (L/2) d^2` around the
/// minimizer set. Samples whose projection onto the minimizers is
/// multivalued are skipped. The estimate is the lower constant
/// `inf 2 (f - inf f) / d^2`.
pub fn sandwich_report(
    oracle: &SubgradientOracle,
    mu: f64,
    smoothness: f64,
    plan: &SamplingPlan,
) -> Result<CertificationReport> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mu must be positive, got {mu}"
        )));
    }
    if !(smoothness >= mu && smoothness.is_finite()) {
        return Err(Error::Usage(format!(
            "sandwich needs L >= mu, got L = {smoothness}, mu = {mu}"
        )));
    }
    let argmin = oracle.argmin().ok_or(Error::MissingArgmin)?;
    let points = check_plan(oracle, plan)?;
    let outcomes = evaluate(&points, |x| {
        let proj = argmin.project(x)?;
        let d = proj.distance;
        if d < plan.exclusion_radius || !proj.is_singleton() {
            return Ok(None);
        }
        let value = oracle.value(x)?;
        let gap = value - oracle.infimum();
        let d2 = d * d;
        let ratio = if d2 > 0.0 {
            2.0 * gap / d2
        } else {
            f64::INFINITY
        };
        let allowance = INEQUALITY_TOL * (1.0 + value.abs());
        let lower = mu / 2.0 * d2 - gap;
        let upper = gap - smoothness / 2.0 * d2;
        Ok(Some((ratio, lower.max(upper) - allowance)))
    })?;
    Ok(inequality_report(Property::Sandwich, Some(mu), &outcomes))
}
