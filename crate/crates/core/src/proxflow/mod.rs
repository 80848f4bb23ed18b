//! Proximal point sequence `x_{k+1} in argmin_u f(u) + 1/2 |u - x_k|^2` for
//! powered distance functions, and the certificate that its length is
//! bounded by the desingularized gap.
//!
//! For `f = (mu/p) d^p` the proximal subproblem reduces to a segment: any
//! `u` at distance `r` from `x` has `d(u) >= d(x) - r`, and the lower bound
//! is attained on the segment from `x` to a nearest point `w`. Along
//! `u = w + s (x - w)` the objective is
//! `(mu/p) (s d)^p + 1/2 (1 - s)^2 d^2`, minimized at the unique root of
//! `mu d^{p-2} s^{p-1} + s - 1 = 0` (`s = 1/(1 + mu)` when `p = 2`).

mod desingularizer;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use desingularizer::Desingularizer;

use crate::certify::{CertificationReport, Property, Verdict};
use crate::funclib::PowerDistance;
use crate::setlib::{Cardinality, Point, TOL_SET};
use crate::{Error, Result};

/// Gap below which a trace counts as converged.
pub const CONVERGED_GAP: f64 = 1e-10;

pub const DEFAULT_STEP_TOL: f64 = 1e-12;

/// Relative slack allowed on every certificate bound.
pub const CERTIFICATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxStep {
    /// Minimizers in lexicographic order.
    pub minimizers: Vec<Point>,
    pub objective: f64,
    /// False when the projection set was sampled, so more minimizers exist.
    pub complete: bool,
}

/// Fraction `s in [0, 1]` of the distance that remains after one prox step.
fn remaining_fraction(f: &PowerDistance, d: f64) -> f64 {
    let (p, mu) = (f.p(), f.mu());
    if p == 2.0 {
        return 1.0 / (1.0 + mu);
    }
    let c = mu * d.powf(p - 2.0);
    if !c.is_finite() {
        return 0.0;
    }
    let g = |s: f64| c * s.powf(p - 1.0) + s - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if g(lo).abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

fn objective(f: &PowerDistance, d: f64, s: f64) -> f64 {
    f.mu() / f.p() * (s * d).powf(f.p()) + 0.5 * ((1.0 - s) * d).powi(2)
}

/// One proximal step with unit step size.
pub fn prox_step(f: &PowerDistance, x: &Point) -> Result<ProxStep> {
    let proj = f.set().project(x)?;
    let d = proj.distance;
    if d <= TOL_SET {
        return Ok(ProxStep {
            minimizers: vec![x.clone()],
            objective: f.from_distance(d),
            complete: true,
        });
    }
    let s = remaining_fraction(f, d);
    let minimizers = proj.representatives.iter().map(|w| w.lerp(x, s)).collect();
    Ok(ProxStep {
        minimizers,
        objective: objective(f, d, s),
        complete: proj.cardinality != Cardinality::Infinite,
    })
}

/// The iterates of the proximal point method from one start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxTrace {
    pub iterates: Vec<Point>,
    /// `f(x_k) - inf f` per iterate.
    pub gaps: Vec<f64>,
    /// `|x_{k+1} - x_k|`, one fewer than the iterates.
    pub steps: Vec<f64>,
    pub total_length: f64,
    pub limit: Point,
    pub converged: bool,
}

impl ProxTrace {
    /// CSV with header `k,x1..xN,gap,step`; the last row has an empty step.
    pub fn to_csv(&self) -> String {
        let dim = self.limit.dim();
        let mut out = String::from("k,");
        for i in 1..=dim {
            out.push_str(&format!("x{i},"));
        }
        out.push_str("gap,step\n");
        for (k, (x, gap)) in self.iterates.iter().zip(&self.gaps).enumerate() {
            out.push_str(&k.to_string());
            for c in x.coords() {
                out.push_str(&format!(",{c}"));
            }
            out.push_str(&format!(",{gap},"));
            if let Some(step) = self.steps.get(k) {
                out.push_str(&step.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the proximal point method from `x0` until a step shorter than `tol`,
/// a minimizer, or `max_iter` steps. Ties between minimizers go to the
/// lexicographically smallest.
pub fn prox_sequence(
    f: &PowerDistance,
    x0: &Point,
    max_iter: usize,
    tol: f64,
) -> Result<ProxTrace> {
    if max_iter == 0 {
        return Err(Error::InvalidParameter(
            "max_iter must be at least 1".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let mut x = x0.clone();
    let mut iterates = vec![x.clone()];
    let mut gaps = vec![f.value(&x)?];
    let mut steps = Vec::new();
    for _ in 0..max_iter {
        if *gaps.last().expect("nonempty") == 0.0 {
            break;
        }
        let step = prox_step(f, &x)?;
        let next = step.minimizers.into_iter().next().expect("nonempty prox");
        let len = next.distance(&x);
        gaps.push(f.value(&next)?);
        steps.push(len);
        iterates.push(next.clone());
        x = next;
        if len < tol {
            break;
        }
    }
    let converged = *gaps.last().expect("nonempty") <= CONVERGED_GAP;
    Ok(ProxTrace {
        total_length: steps.iter().sum(),
        limit: x,
        iterates,
        gaps,
        steps,
        converged,
    })
}

/// One checked inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        let allowance = CERTIFICATE_TOL * (1.0 + lhs.abs().max(rhs.abs()));
        BoundCheck {
            name: name.to_string(),
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs - rhs <= allowance,
        }
    }
}

/// Finite-length certificate of a prox trace.
///
/// The embedded report uses the certify JSON schema: `claimed_constant` is
/// the Lojasiewicz modulus used to build `phi`, and `estimated_constant` is
/// the largest `c` with `phi_c^{-1}(d_argmin(x0)) <= f(x0) - inf f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteLengthCertificate {
    #[serde(flatten)]
    pub report: CertificationReport,
    pub bounds: Vec<BoundCheck>,
    /// Steps violating `|x_{k+1} - x_k| <= phi(gap_k) - phi(gap_{k+1})`.
    pub telescoping_failures: usize,
    /// Smallest per-step slack of the telescoping bound.
    #[serde(with = "crate::certify::extended_real")]
    pub worst_telescoping_slack: f64,
}

impl FiniteLengthCertificate {
    pub fn holds(&self) -> bool {
        self.report.holds()
    }
}

/// Checks the bounds of the finite-length argument on a converged trace:
///
/// 1. `total_length <= phi(gap_0)`,
/// 2. `|x0 - limit| <= phi(gap_0)`,
/// 3. `(mu/p) d_argmin(x0)^p / (p - 1)^{p - 1} <= gap_0`,
///
/// plus the per-step telescoping bound. `phi` is built from the sharp
/// Lojasiewicz modulus of `f` (see [`PowerDistance::lojasiewicz_modulus`]).
pub fn finite_length_certificate(
    trace: &ProxTrace,
    f: &PowerDistance,
    x0: &Point,
) -> Result<FiniteLengthCertificate> {
    let p = f.p();
    let modulus = f.lojasiewicz_modulus();
    let phi = Desingularizer::new(p, modulus)?;
    let property = Property::FiniteLength { p };
    if !trace.converged {
        return Ok(FiniteLengthCertificate {
            report: CertificationReport {
                property,
                estimated_constant: f64::NAN,
                claimed_constant: Some(modulus),
                verdict: Verdict::Inconclusive,
                witness: Some(x0.clone()),
                samples_used: trace.steps.len(),
                tolerance: CERTIFICATE_TOL,
            },
            bounds: Vec::new(),
            telescoping_failures: 0,
            worst_telescoping_slack: f64::NAN,
        });
    }
    let gap0 = f.value(x0)?;
    let d0 = f.set().distance(x0)?;
    let phi0 = phi.phi(gap0);
    let bounds = vec![
        BoundCheck::new("total_length", trace.total_length, phi0),
        BoundCheck::new("distance_to_limit", x0.distance(&trace.limit), phi0),
        BoundCheck::new("conditioning", phi.phi_inv(d0), gap0),
    ];
    let mut telescoping_failures = 0;
    let mut worst = f64::INFINITY;
    for (k, step) in trace.steps.iter().enumerate() {
        let check = BoundCheck::new(
            "telescoping",
            *step,
            phi.phi(trace.gaps[k]) - phi.phi(trace.gaps[k + 1]),
        );
        worst = worst.min(check.slack);
        if !check.holds {
            telescoping_failures += 1;
        }
    }
    let estimated = if d0 > 0.0 {
        (p - 1.0).powf(p - 1.0) * p * gap0 / d0.powf(p)
    } else {
        f64::INFINITY
    };
    let ok = bounds.iter().all(|b| b.holds) && telescoping_failures == 0;
    Ok(FiniteLengthCertificate {
        report: CertificationReport {
            property,
            estimated_constant: estimated,
            claimed_constant: Some(modulus),
            verdict: if ok {
                Verdict::Holds
            } else {
                Verdict::Violated
            },
            witness: Some(x0.clone()),
            samples_used: trace.steps.len(),
            tolerance: CERTIFICATE_TOL,
        },
        bounds,
        telescoping_failures,
        worst_telescoping_slack: worst,
    })
}

/// Result of probing the prox objective at random points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxAudit {
    pub objective: f64,
    pub best_probe: f64,
    pub probes: usize,
    /// Probes with a strictly smaller objective than the returned one.
    pub failures: usize,
}

/// Compares [`prox_step`]'s objective against `probes` uniform points in the
/// ball of radius `2 d(x)` around `x`.
pub fn audit_prox_step(
    f: &PowerDistance,
    x: &Point,
    probes: usize,
    seed: u64,
) -> Result<ProxAudit> {
    let step = prox_step(f, x)?;
    let d = f.set().distance(x)?;
    let radius = 2.0 * d;
    let dim = x.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let allowance = 1e-12 * (1.0 + step.objective.abs());
    let mut best_probe = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..probes {
        let dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let dir = Point::from_raw(dir);
        let norm = dir.norm();
        if norm == 0.0 {
            continue;
        }
        let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
        let u = x.add(&dir.scale(r / norm));
        let value = f.value(&u)? + 0.5 * u.distance_squared(x);
        best_probe = best_probe.min(value);
        if value < step.objective - allowance {
            failures += 1;
        }
    }
    Ok(ProxAudit {
        objective: step.objective,
        best_probe,
        probes,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setlib::{pt, ClosedSet};

    fn half_sq(set: ClosedSet, mu: f64) -> PowerDistance {
        PowerDistance::half_squared(set, mu).unwrap()
    }

    /// Brute-force prox over a 2-D grid of candidate points.
    fn grid_prox(f: &PowerDistance, x: &Point, half_width: f64, n: usize) -> (Point, f64) {
        let mut best = (x.clone(), f64::INFINITY);
        for i in 0..=n {
            for j in 0..=n {
                let u = pt(&[
                    x[0] - half_width + 2.0 * half_width * i as f64 / n as f64,
                    x[1] - half_width + 2.0 * half_width * j as f64 / n as f64,
                ]);
                let v = f.value(&u).unwrap() + 0.5 * u.distance_squared(x);
                if v < best.1 {
                    best = (u, v);
                }
            }
        }
        best
    }

    #[test]
    fn circle_prox_from_two_zero() {
        let f = half_sq(ClosedSet::unit_circle(), 1.0);
        let step = prox_step(&f, &pt(&[2.0, 0.0])).unwrap();
        assert_eq!(step.minimizers, vec![pt(&[1.5, 0.0])]);
        assert!((step.objective - 0.25).abs() < 1e-15);
        let (u, v) = grid_prox(&f, &pt(&[2.0, 0.0]), 1.0, 400);
        assert!(u.distance(&pt(&[1.5, 0.0])) < 1e-2);
        assert!(step.objective <= v + 1e-15);
    }

    #[test]
    fn prox_fixed_on_the_set() {
        let f = half_sq(ClosedSet::unit_circle(), 1.0);
        let step = prox_step(&f, &pt(&[0.0, 1.0])).unwrap();
        assert_eq!(step.minimizers, vec![pt(&[0.0, 1.0])]);
        assert_eq!(step.objective, 0.0);
    }

    #[test]
    fn singleton_prox_halves() {
        let f = half_sq(ClosedSet::singleton(pt(&[0.0])), 1.0);
        let step = prox_step(&f, &pt(&[4.0])).unwrap();
        assert_eq!(step.minimizers, vec![pt(&[2.0])]);
        // 1-D brute force on the line
        let brute = (0..=80_000)
            .map(|i| -4.0 + 12.0 * i as f64 / 80_000.0)
            .map(|u: f64| 0.5 * u * u + 0.5 * (u - 4.0) * (u - 4.0))
            .fold(f64::INFINITY, f64::min);
        assert!((step.objective - brute).abs() < 1e-12);
    }

    #[test]
    fn general_exponent_stationarity() {
        for (p, mu) in [(1.5, 0.7), (3.0, 2.0), (4.0, 0.1)] {
            let f = PowerDistance::new(ClosedSet::singleton(pt(&[0.0])), p, mu).unwrap();
            let x = pt(&[1.3]);
            let u = prox_step(&f, &x).unwrap().minimizers[0][0];
            // optimality: mu u^{p-1} + (u - x) = 0 for 0 < u < x
            let residual = mu * u.powf(p - 1.0) + (u - 1.3);
            assert!(residual.abs() < 1e-12, "p={p}: {residual}");
        }
    }

    #[test]
    fn prox_objective_bounded_by_endpoints() {
        let f = PowerDistance::new(ClosedSet::parabola(1.0).unwrap(), 3.0, 1.0).unwrap();
        let x = pt(&[0.4, 2.5]);
        let step = prox_step(&f, &x).unwrap();
        let d = f.set().distance(&x).unwrap();
        assert!(step.objective <= f.value(&x).unwrap());
        assert!(step.objective <= 0.5 * d * d);
    }

    #[test]
    fn halving_sequence_on_the_line() {
        let f = half_sq(ClosedSet::singleton(pt(&[0.0])), 1.0);
        let trace = prox_sequence(&f, &pt(&[1.0]), 200, DEFAULT_STEP_TOL).unwrap();
        for (k, x) in trace.iterates.iter().take(10).enumerate() {
            assert_eq!(x[0], 0.5f64.powi(k as i32));
        }
        assert!((trace.total_length - 1.0).abs() < 1e-9);
        assert!(trace.limit[0].abs() < 1e-9);
        assert!(trace.converged);
        assert!(trace.gaps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn trace_starting_on_the_set_is_constant() {
        let f = half_sq(ClosedSet::unit_circle(), 1.0);
        let trace = prox_sequence(&f, &pt(&[1.0, 0.0]), 10, DEFAULT_STEP_TOL).unwrap();
        assert_eq!(trace.iterates.len(), 1);
        assert_eq!(trace.total_length, 0.0);
        assert!(trace.converged);
        assert_eq!(trace.to_csv(), "k,x1,x2,gap,step\n0,1,0,0,\n");
    }

    #[test]
    fn circle_trace_from_two_zero() {
        let f = half_sq(ClosedSet::unit_circle(), 1.0);
        let x0 = pt(&[2.0, 0.0]);
        let trace = prox_sequence(&f, &x0, 200, DEFAULT_STEP_TOL).unwrap();
        assert!(trace.converged);
        assert!(trace.limit.distance(&pt(&[1.0, 0.0])) < 1e-9);
        assert!((trace.total_length - 1.0).abs() < 1e-9);
        let cert = finite_length_certificate(&trace, &f, &x0).unwrap();
        assert!(cert.holds(), "{cert:?}");
        let dist = &cert.bounds[1];
        assert!((dist.rhs - 1.0).abs() < 1e-15);
        assert!(dist.slack.abs() < 1e-9);
    }

    #[test]
    fn step_law_for_p_two() {
        let mu = 0.5;
        let f = half_sq(ClosedSet::parabola(1.0).unwrap(), mu);
        let trace = prox_sequence(&f, &pt(&[1.0, -2.0]), 200, DEFAULT_STEP_TOL).unwrap();
        for k in 0..10 {
            let dk = f.set().distance(&trace.iterates[k]).unwrap();
            let dk1 = f.set().distance(&trace.iterates[k + 1]).unwrap();
            assert!((trace.steps[k] - mu / (1.0 + mu) * dk).abs() <= 1e-9 * dk);
            assert!((dk1 - dk / (1.0 + mu)).abs() <= 1e-9 * dk);
        }
    }

    #[test]
    fn singleton_certificate_is_tight() {
        let f = half_sq(ClosedSet::singleton(pt(&[0.0])), 1.0);
        let x0 = pt(&[1.0]);
        let trace = prox_sequence(&f, &x0, 200, DEFAULT_STEP_TOL).unwrap();
        let cert = finite_length_certificate(&trace, &f, &x0).unwrap();
        assert!(cert.holds());
        assert_eq!(cert.bounds[0].rhs, 1.0);
        assert!(cert.bounds[0].slack.abs() < 1e-9);
        assert_eq!(cert.report.claimed_constant, Some(1.0));
    }

    #[test]
    fn certificate_at_a_minimizer() {
        let f = half_sq(ClosedSet::unit_circle(), 1.0);
        let x0 = pt(&[0.0, -1.0]);
        let trace = prox_sequence(&f, &x0, 10, DEFAULT_STEP_TOL).unwrap();
        let cert = finite_length_certificate(&trace, &f, &x0).unwrap();
        assert!(cert.holds());
        assert!(cert.bounds.iter().all(|b| b.lhs == 0.0 && b.rhs == 0.0));
    }

    #[test]
    fn unconverged_trace_is_inconclusive() {
        let f = half_sq(ClosedSet::unit_circle(), 1.0);
        let x0 = pt(&[3.0, 0.0]);
        let trace = prox_sequence(&f, &x0, 2, DEFAULT_STEP_TOL).unwrap();
        assert!(!trace.converged);
        let cert = finite_length_certificate(&trace, &f, &x0).unwrap();
        assert_eq!(cert.report.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn certificate_with_general_exponents() {
        for (p, mu) in [(1.5, 1.0), (3.0, 2.0)] {
            let f = PowerDistance::new(ClosedSet::unit_circle(), p, mu).unwrap();
            let x0 = pt(&[1.2, 0.3]);
            let trace = prox_sequence(&f, &x0, 100_000, DEFAULT_STEP_TOL).unwrap();
            assert!(trace.converged, "p={p}");
            let cert = finite_length_certificate(&trace, &f, &x0).unwrap();
            assert!(cert.holds(), "p={p}: {cert:?}");
        }
    }

    #[test]
    fn audit_finds_no_better_probe() {
        let f = half_sq(
            ClosedSet::point_cloud(vec![pt(&[-1.0, 0.0]), pt(&[1.0, 0.0])]).unwrap(),
            1.0,
        );
        let audit = audit_prox_step(&f, &pt(&[0.0, 0.5]), 10_000, 1).unwrap();
        assert_eq!(audit.failures, 0);
        assert!(audit.best_probe >= audit.objective - 1e-12);
    }

    #[test]
    fn invalid_sequence_parameters() {
        let f = half_sq(ClosedSet::unit_circle(), 1.0);
        assert!(prox_sequence(&f, &pt(&[2.0, 0.0]), 0, 1e-12).is_err());
        assert!(prox_sequence(&f, &pt(&[2.0, 0.0]), 10, 0.0).is_err());
        assert!(prox_sequence(&f, &pt(&[2.0]), 10, 1e-12).is_err());
    }
}
