//! Powered distance functions and their subdifferentials.
//!
//! For a closed set `S`, `p > 1` and `mu > 0`, the function
//! `f(x) = (mu/p) d_S(x)^p` has `inf f = 0`, `argmin f = S`, and limiting
//! subdifferential
//!
//! * `{0}` on `S`,
//! * `{ mu d^{p-2} (x - w) : w in proj_S(x) }` off `S`.
//!
//! Every limiting subgradient at a point off `S` has the same norm
//! `mu d^{p-1}`, so a finite sample of the projection set loses nothing when
//! checking norm-based inequalities. The Clarke subdifferential is the closed
//! convex hull of the limiting one; it is only evaluated when the hull is
//! decidable from the witnesses.

mod hull;
mod smooth;

use serde::{Deserialize, Serialize};

pub use hull::min_norm_point;
pub use smooth::{Evaluation, SmoothTestFunction};

use crate::setlib::{Cardinality, ClosedSet, Point, TOL_SET};
use crate::{Error, Result};

/// Below this distance with `p < 2` the factor `d^{p-2}` is flagged.
pub const ILL_CONDITIONED_DISTANCE: f64 = 1e-8;

/// Zero test for Clarke minimum norms.
pub const CLARKE_ZERO_TOL: f64 = 1e-9;

/// `f(x) = (mu/p) d_set(x)^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDistance {
    set: ClosedSet,
    p: f64,
    mu: f64,
}

/// A finite set of limiting subgradients at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgradientSample {
    pub vectors: Vec<Point>,
    /// The vectors are exactly the limiting subdifferential.
    pub complete: bool,
    /// `p < 2` and the point is within [`ILL_CONDITIONED_DISTANCE`] of the set.
    #[serde(default)]
    pub ill_conditioned: bool,
}

impl SubgradientSample {
    pub fn exact(vectors: Vec<Point>) -> Self {
        SubgradientSample {
            vectors,
            complete: true,
            ill_conditioned: false,
        }
    }

    /// Smallest witness norm; `None` for an empty sample.
    pub fn min_norm(&self) -> Option<f64> {
        self.vectors.iter().map(Point::norm).reduce(f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClarkeMinNorm {
    pub min_norm: f64,
    pub contains_zero: bool,
}

impl ClarkeMinNorm {
    fn new(min_norm: f64) -> Self {
        ClarkeMinNorm {
            min_norm,
            contains_zero: min_norm <= CLARKE_ZERO_TOL,
        }
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "exponent p must exceed 1, got {p}"
        )))
    }
}

pub(crate) fn check_modulus(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "modulus mu must be positive, got {mu}"
        )))
    }
}

/// Conjugate exponent `q` with `1/p + 1/q = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

impl PowerDistance {
    pub fn new(set: ClosedSet, p: f64, mu: f64) -> Result<Self> {
        check_exponent(p)?;
        check_modulus(mu)?;
        Ok(PowerDistance { set, p, mu })
    }

    /// `(mu/2) d^2`.
    pub fn half_squared(set: ClosedSet, mu: f64) -> Result<Self> {
        Self::new(set, 2.0, mu)
    }

    pub fn set(&self) -> &ClosedSet {
        &self.set
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        conjugate_exponent(self.p)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn dim(&self) -> usize {
        self.set.ambient_dim()
    }

    /// Same function with `mu` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.set.clone(), self.p, self.mu * factor)
    }

    /// Largest constant for which the global p-Lojasiewicz inequality
    /// `f - inf f <= |x*|^q / (q c^{q/p})` holds everywhere:
    /// `c = mu (p - 1)^{p - 1}`, which reduces to `mu` for `p = 2`.
    pub fn lojasiewicz_modulus(&self) -> f64 {
        self.mu * (self.p - 1.0).powf(self.p - 1.0)
    }

    pub fn from_distance(&self, d: f64) -> f64 {
        if d <= TOL_SET {
            0.0
        } else {
            self.mu / self.p * d.powf(self.p)
        }
    }

    /// `(mu/p) d^p`, exactly zero on the set (membership within `TOL_SET`).
    pub fn value(&self, x: &Point) -> Result<f64> {
        Ok(self.from_distance(self.set.distance(x)?))
    }

    pub fn limiting_subdiff(&self, x: &Point) -> Result<SubgradientSample> {
        let proj = self.set.project(x)?;
        let d = proj.distance;
        if d <= TOL_SET {
            return Ok(SubgradientSample::exact(vec![Point::zeros(x.dim())]));
        }
        let factor = self.mu * d.powf(self.p - 2.0);
        let vectors = proj
            .representatives
            .iter()
            .map(|w| x.sub(w).scale(factor))
            .collect();
        Ok(SubgradientSample {
            vectors,
            complete: proj.cardinality != Cardinality::Infinite,
            ill_conditioned: self.p < 2.0 && d < ILL_CONDITIONED_DISTANCE,
        })
    }

    /// Norm of the minimum-norm element of the Clarke subdifferential.
    ///
    /// Fails with [`Error::HullUndecidable`] when the limiting witnesses are
    /// only a sample, except at the center of a sphere of dimension >= 1
    /// where the hull is the full ball.
    pub fn clarke_min_norm(&self, x: &Point) -> Result<ClarkeMinNorm> {
        let sample = self.limiting_subdiff(x)?;
        if sample.complete {
            return Ok(ClarkeMinNorm::new(min_norm_point(&sample.vectors).norm()));
        }
        match &self.set {
            ClosedSet::Sphere { center, .. } if x == center => Ok(ClarkeMinNorm::new(0.0)),
            _ => Err(Error::HullUndecidable),
        }
    }

    /// Witnesses augmented with the minimum-norm Clarke subgradient, so the
    /// smallest norm in the sample is the Clarke one.
    pub fn clarke_subdiff(&self, x: &Point) -> Result<SubgradientSample> {
        let mut sample = self.limiting_subdiff(x)?;
        if sample.complete {
            let m = min_norm_point(&sample.vectors);
            sample.vectors.push(m);
        } else {
            match &self.set {
                ClosedSet::Sphere { center, .. } if x == center => {
                    sample.vectors.push(Point::zeros(x.dim()));
                }
                _ => return Err(Error::HullUndecidable),
            }
        }
        // the result is a sample of the Clarke set, not all of it
        sample.complete = false;
        Ok(sample)
    }
}

/// Any function the certifiers can consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionSpec", into = "FunctionSpec")]
pub enum Function {
    PowerDistance(PowerDistance),
    Smooth(SmoothTestFunction),
}

/// JSON wire format of [`Function`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    PowerDistance { mu: f64, p: f64, set: ClosedSet },
    Quadratic { a: Vec<Vec<f64>>, b: Point },
    PowerNorm { mu: f64, p: f64 },
}

impl TryFrom<FunctionSpec> for Function {
    type Error = Error;

    fn try_from(spec: FunctionSpec) -> Result<Self> {
        Ok(match spec {
            FunctionSpec::PowerDistance { mu, p, set } => {
                Function::PowerDistance(PowerDistance::new(set, p, mu)?)
            }
            FunctionSpec::Quadratic { a, b } => {
                Function::Smooth(SmoothTestFunction::quadratic(a, b)?)
            }
            FunctionSpec::PowerNorm { mu, p } => {
                Function::Smooth(SmoothTestFunction::power_norm(mu, p)?)
            }
        })
    }
}

impl From<Function> for FunctionSpec {
    fn from(f: Function) -> Self {
        match f {
            Function::PowerDistance(f) => FunctionSpec::PowerDistance {
                mu: f.mu,
                p: f.p,
                set: f.set,
            },
            Function::Smooth(SmoothTestFunction::Quadratic { a, b }) => {
                FunctionSpec::Quadratic { a, b }
            }
            Function::Smooth(SmoothTestFunction::PowerNorm { mu, p }) => {
                FunctionSpec::PowerNorm { mu, p }
            }
        }
    }
}

impl Function {
    /// Fixed ambient dimension, if any (power norms work in every dimension).
    pub fn dim(&self) -> Option<usize> {
        match self {
            Function::PowerDistance(f) => Some(f.dim()),
            Function::Smooth(g) => g.dim(),
        }
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        match self {
            Function::PowerDistance(f) => f.value(x),
            Function::Smooth(g) => Ok(g.eval(x)?.value),
        }
    }

    pub fn limiting_subdiff(&self, x: &Point) -> Result<SubgradientSample> {
        match self {
            Function::PowerDistance(f) => f.limiting_subdiff(x),
            Function::Smooth(g) => Ok(SubgradientSample::exact(vec![g.eval(x)?.gradient])),
        }
    }

    pub fn argmin(&self, dim: usize) -> Result<ClosedSet> {
        match self {
            Function::PowerDistance(f) => {
                if f.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: f.dim(),
                        found: dim,
                    });
                }
                Ok(f.set.clone())
            }
            Function::Smooth(g) => g.argmin(dim),
        }
    }
}
