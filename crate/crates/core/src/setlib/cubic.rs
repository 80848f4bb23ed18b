//! Real roots of depressed cubics `t^3 + p t + q = 0`.
//!
//! Closed-form (Cardano or trigonometric) estimates are polished with
//! guarded Newton steps; a root whose residual stays large after polishing
//! is recovered by bracketed bisection.

use std::f64::consts::PI;

const NEWTON_STEPS: usize = 12;
const BISECTION_STEPS: usize = 200;

fn eval(p: f64, q: f64, t: f64) -> f64 {
    (t * t + p) * t + q
}

fn residual_scale(p: f64, q: f64, t: f64) -> f64 {
    (t * t * t).abs() + (p * t).abs() + q.abs()
}

fn polish(p: f64, q: f64, mut t: f64) -> f64 {
    let mut r = eval(p, q, t);
    for _ in 0..NEWTON_STEPS {
        if r == 0.0 {
            break;
        }
        let slope = 3.0 * t * t + p;
        if slope == 0.0 {
            break;
        }
        let next = t - r / slope;
        let r_next = eval(p, q, next);
        if !(r_next.abs() < r.abs()) {
            break;
        }
        t = next;
        r = r_next;
    }
    t
}

/// Expands a window around `t` until the cubic changes sign, then bisects.
/// Returns `None` when no sign change is found (even-multiplicity root).
fn bisect_near(p: f64, q: f64, t: f64) -> Option<f64> {
    let mut h = 1e-8 * (1.0 + t.abs());
    for _ in 0..60 {
        let (mut lo, mut hi) = (t - h, t + h);
        let (flo, fhi) = (eval(p, q, lo), eval(p, q, hi));
        if flo == 0.0 {
            return Some(lo);
        }
        if fhi == 0.0 {
            return Some(hi);
        }
        if flo.signum() != fhi.signum() {
            let rising = fhi > 0.0;
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                let fm = eval(p, q, mid);
                if fm == 0.0 {
                    return Some(mid);
                }
                if (fm > 0.0) == rising {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        h *= 2.0;
    }
    None
}

fn refine(p: f64, q: f64, t: f64) -> f64 {
    let t = polish(p, q, t);
    let r = eval(p, q, t);
    if r.abs() <= 1e-12 * residual_scale(p, q, t).max(f64::MIN_POSITIVE) {
        return t;
    }
    match bisect_near(p, q, t) {
        Some(b) if eval(p, q, b).abs() < r.abs() => b,
        _ => t,
    }
}

/// All distinct real roots of `t^3 + p t + q`, ascending.
pub fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    if p == 0.0 && q == 0.0 {
        return vec![0.0];
    }
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;

    let mut roots: Vec<f64> = if disc > 0.0 {
        // single real root; pick the cube root without cancellation
        let s = disc.sqrt();
        let u = -(half_q.abs() + s).cbrt() * if q >= 0.0 { 1.0 } else { -1.0 };
        let v = if u != 0.0 { -third_p / u } else { 0.0 };
        vec![u + v]
    } else {
        // three real roots (p < 0 here)
        let m = 2.0 * (-third_p).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * PI * k as f64 / 3.0).cos())
            .collect()
    };

    for r in roots.iter_mut() {
        *r = refine(p, q, *r);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())));
    roots
}
