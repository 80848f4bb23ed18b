use nalgebra::{DMatrix, SymmetricEigen};

use crate::setlib::{ClosedSet, Point};
use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues above `-EIGEN_TOL * max|lambda|` count as nonnegative, and
/// those below `EIGEN_TOL * max|lambda|` span the null space.
const EIGEN_TOL: f64 = 1e-12;

/// Smooth reference functions with analytic value, gradient and minimizers.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothTestFunction {
    /// `1/2 (x - b)^T A (x - b)` with `A` symmetric positive semidefinite.
    Quadratic { a: Vec<Vec<f64>>, b: Point },
    /// `(mu/p) |x|^p`.
    PowerNorm { mu: f64, p: f64 },
}

/// Value and gradient at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Point,
}

fn eigen(a: &[Vec<f64>]) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    SymmetricEigen::new(m)
}

impl SmoothTestFunction {
    pub fn quadratic(a: Vec<Vec<f64>>, b: Point) -> Result<Self> {
        let n = b.dim();
        if a.len() != n || a.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "quadratic matrix must be {n}x{n} to match the shift"
            )));
        }
        if a.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "quadratic matrix has non-finite entries".into(),
            ));
        }
        for i in 0..n {
            for j in 0..i {
                if (a[i][j] - a[j][i]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "quadratic matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let eig = eigen(&a);
        let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if eig
            .eigenvalues
            .iter()
            .any(|&l| l < -EIGEN_TOL * top.max(1.0))
        {
            return Err(Error::InvalidParameter(
                "quadratic matrix is not positive semidefinite".into(),
            ));
        }
        Ok(SmoothTestFunction::Quadratic { a, b })
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let a = (0..n)
            .map(|i| (0..n).map(|j| if i == j { diag[i] } else { 0.0 }).collect())
            .collect();
        Self::quadratic(a, Point::zeros(n))
    }

    pub fn power_norm(mu: f64, p: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mu must be positive, got {mu}"
            )));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
        }
        Ok(SmoothTestFunction::PowerNorm { mu, p })
    }

    /// Fixed dimension, if the function has one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            SmoothTestFunction::Quadratic { b, .. } => Some(b.dim()),
            SmoothTestFunction::PowerNorm { .. } => None,
        }
    }

    pub fn eval(&self, x: &Point) -> Result<Evaluation> {
        match self {
            SmoothTestFunction::Quadratic { a, b } => {
                x.ensure_dim(b.dim())?;
                let r = x.sub(b);
                let ar: Vec<f64> = a
                    .iter()
                    .map(|row| row.iter().zip(r.coords()).map(|(m, v)| m * v).sum())
                    .collect();
                let gradient = Point::from_raw(ar);
                Ok(Evaluation {
                    value: 0.5 * r.dot(&gradient),
                    gradient,
                })
            }
            SmoothTestFunction::PowerNorm { mu, p } => {
                let n = x.norm();
                if n == 0.0 {
                    return Ok(Evaluation {
                        value: 0.0,
                        gradient: Point::zeros(x.dim()),
                    });
                }
                Ok(Evaluation {
                    value: mu / p * n.powf(*p),
                    gradient: x.scale(mu * n.powf(p - 2.0)),
                })
            }
        }
    }

    /// Eigenvalues of `A`, ascending (quadratics only).
    pub fn eigenvalues(&self) -> Option<Vec<f64>> {
        match self {
            SmoothTestFunction::Quadratic { a, .. } => {
                let mut ev: Vec<f64> = eigen(a).eigenvalues.iter().copied().collect();
                ev.sort_by(f64::total_cmp);
                Some(ev)
            }
            SmoothTestFunction::PowerNorm { .. } => None,
        }
    }

    /// The minimizer set in ambient dimension `dim` (`inf f = 0` for both
    /// variants). For a quadratic it is `b + ker A`.
    pub fn argmin(&self, dim: usize) -> Result<ClosedSet> {
        match self {
            SmoothTestFunction::Quadratic { a, b } => {
                b.ensure_dim(dim)?;
                let eig = eigen(a);
                let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let basis = (0..dim)
                    .filter(|&k| eig.eigenvalues[k].abs() <= EIGEN_TOL * top.max(1.0))
                    .map(|k| Point::from_raw(eig.eigenvectors.column(k).iter().copied().collect()))
                    .collect();
                ClosedSet::affine(b.clone(), basis)
            }
            SmoothTestFunction::PowerNorm { .. } => Ok(ClosedSet::singleton(Point::zeros(dim))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setlib::pt;

    fn central_difference(f: &SmoothTestFunction, x: &Point, h: f64) -> Vec<f64> {
        (0..x.dim())
            .map(|i| {
                let e = Point::axis(x.dim(), i, h);
                let fp = f.eval(&x.add(&e)).unwrap().value;
                let fm = f.eval(&x.sub(&e)).unwrap().value;
                (fp - fm) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn power_norm_quadratic_case() {
        let f = SmoothTestFunction::power_norm(1.0, 2.0).unwrap();
        let x = pt(&[3.0, -4.0]);
        let e = f.eval(&x).unwrap();
        assert_eq!(e.value, 12.5);
        assert_eq!(e.gradient, x);
    }

    #[test]
    fn power_norm_at_origin() {
        let f = SmoothTestFunction::power_norm(2.0, 1.5).unwrap();
        let e = f.eval(&pt(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.gradient, pt(&[0.0, 0.0, 0.0]));
    }

    #[test]
    fn quadratic_diag_one_four() {
        let f = SmoothTestFunction::diagonal(&[1.0, 4.0]).unwrap();
        let x = pt(&[1.0, 1.0]);
        let e = f.eval(&x).unwrap();
        assert_eq!(e.value, 2.5);
        assert_eq!(e.gradient, pt(&[1.0, 4.0]));
        let fd = central_difference(&f, &x, 1e-5);
        assert!((fd[0] - 1.0).abs() < 1e-8 && (fd[1] - 4.0).abs() < 1e-8);
    }

    #[test]
    fn power_norm_gradient_matches_finite_differences() {
        let f = SmoothTestFunction::power_norm(0.7, 3.0).unwrap();
        let x = pt(&[0.4, -1.1, 0.3]);
        let g = f.eval(&x).unwrap().gradient;
        for (a, b) in g.coords().iter().zip(central_difference(&f, &x, 1e-5)) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_quadratics() {
        let asym = vec![vec![1.0, 0.5], vec![0.0, 1.0]];
        assert!(SmoothTestFunction::quadratic(asym, pt(&[0.0, 0.0])).is_err());
        let indefinite = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
        assert!(SmoothTestFunction::quadratic(indefinite, pt(&[0.0, 0.0])).is_err());
        assert!(SmoothTestFunction::quadratic(vec![vec![1.0]], pt(&[0.0, 0.0])).is_err());
        assert!(SmoothTestFunction::power_norm(1.0, 1.0).is_err());
        assert!(SmoothTestFunction::power_norm(0.0, 2.0).is_err());
    }

    #[test]
    fn semidefinite_argmin_is_kernel() {
        let f =
            SmoothTestFunction::quadratic(vec![vec![1.0, 0.0], vec![0.0, 0.0]], pt(&[2.0, 0.0]))
                .unwrap();
        let argmin = f.argmin(2).unwrap();
        assert_eq!(argmin.distance(&pt(&[2.0, 7.0])).unwrap(), 0.0);
        assert_eq!(argmin.distance(&pt(&[5.0, 7.0])).unwrap(), 3.0);
    }
}
