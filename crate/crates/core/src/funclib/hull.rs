//! Minimum-norm point of the convex hull of finitely many vectors.
//!
//! Two or fewer vectors use the closed-form segment projection. Larger sets
//! run Wolfe's nearest-point algorithm, which keeps an affinely independent
//! corral and stops once the Frank-Wolfe duality gap
//! `|x|^2 - min_i <x, v_i>` drops below `1e-12` (relative to the largest
//! squared norm).

use crate::setlib::Point;

const GAP_TOL: f64 = 1e-12;
const COEF_TOL: f64 = 1e-15;
const MAX_MAJOR: usize = 1000;

/// Returns the minimum-norm element of `conv(vectors)`.
///
/// Panics if `vectors` is empty; all vectors must share one dimension.
pub fn min_norm_point(vectors: &[Point]) -> Point {
    assert!(!vectors.is_empty(), "hull of an empty set");
    match vectors {
        [a] => a.clone(),
        [a, b] => segment_min_norm(a, b),
        _ => wolfe(vectors),
    }
}

fn segment_min_norm(a: &Point, b: &Point) -> Point {
    let dir = b.sub(a);
    let len2 = dir.norm_squared();
    if len2 == 0.0 {
        return a.clone();
    }
    let t = (-a.dot(&dir) / len2).clamp(0.0, 1.0);
    a.lerp(b, t)
}

fn combine(vectors: &[Point], idx: &[usize], weights: &[f64]) -> Point {
    let dim = vectors[0].dim();
    let mut acc = vec![0.0; dim];
    for (&i, &w) in idx.iter().zip(weights) {
        for (a, v) in acc.iter_mut().zip(vectors[i].coords()) {
            *a += w * v;
        }
    }
    Point::from_raw(acc)
}

/// Affine minimizer of the norm over `aff{v_i : i in idx}`: solves
/// `[G 1; 1^T 0][a; nu] = [0; 1]` with `G` the Gram matrix.
fn affine_min_norm(vectors: &[Point], idx: &[usize]) -> Option<Vec<f64>> {
    let k = idx.len();
    let n = k + 1;
    let mut m = vec![vec![0.0; n + 1]; n];
    for r in 0..k {
        for c in 0..k {
            m[r][c] = vectors[idx[r]].dot(&vectors[idx[c]]);
        }
        m[r][k] = 1.0;
        m[k][r] = 1.0;
    }
    m[k][n] = 1.0;
    let scale = m
        .iter()
        .flat_map(|row| row[..n].iter())
        .fold(0.0f64, |s, v| s.max(v.abs()));
    solve_in_place(&mut m, n, 1e-14 * scale.max(1.0)).map(|sol| sol[..k].to_vec())
}

/// Gaussian elimination with partial pivoting on an augmented `n x (n+1)`
/// matrix.
fn solve_in_place(m: &mut [Vec<f64>], n: usize, pivot_tol: f64) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() <= pivot_tol {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    Some(x)
}

fn wolfe(vectors: &[Point]) -> Point {
    let scale = vectors
        .iter()
        .map(Point::norm_squared)
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let start = (0..vectors.len())
        .min_by(|&a, &b| {
            vectors[a]
                .norm_squared()
                .total_cmp(&vectors[b].norm_squared())
        })
        .expect("nonempty");
    let mut corral = vec![start];
    let mut weights = vec![1.0];
    let mut x = vectors[start].clone();

    for _ in 0..MAX_MAJOR {
        let xx = x.norm_squared();
        let (j, xv) = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (i, x.dot(v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if xx - xv <= GAP_TOL * scale || corral.contains(&j) {
            break;
        }
        corral.push(j);
        weights.push(0.0);

        // minor cycle: move toward the affine minimizer until it lies in the
        // relative interior of the corral
        loop {
            let Some(alpha) = affine_min_norm(vectors, &corral) else {
                // degenerate corral; drop the newest point and stop
                corral.pop();
                weights.pop();
                return combine(vectors, &corral, &weights);
            };
            if alpha.iter().all(|&a| a > COEF_TOL) {
                weights = alpha;
                break;
            }
            let theta = weights
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= COEF_TOL)
                .map(|(&w, &a)| w / (w - a))
                .fold(1.0f64, f64::min);
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w = (1.0 - theta) * *w + theta * a;
            }
            let mut k = 0;
            while k < corral.len() {
                if weights[k] <= COEF_TOL {
                    corral.remove(k);
                    weights.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
        }
        x = combine(vectors, &corral, &weights);
    }
    x
}
