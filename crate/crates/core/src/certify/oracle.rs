use std::fmt;
use std::sync::Arc;

use crate::funclib::{Function, PowerDistance, SmoothTestFunction, SubgradientSample};
use crate::setlib::{ClosedSet, Point};
use crate::{Error, Result};

type ValueFn = dyn Fn(&Point) -> Result<f64> + Send + Sync;
type SubgradientFn = dyn Fn(&Point) -> Result<SubgradientSample> + Send + Sync;

/// Spot-check tolerance for the argmin descriptor.
const ARGMIN_CHECK_TOL: f64 = 1e-9;

/// A function exposed through its values and subgradient samples, with its
/// infimum supplied analytically and (optionally) its minimizer set.
#[derive(Clone)]
pub struct SubgradientOracle {
    dim: usize,
    value: Arc<ValueFn>,
    subgradients: Arc<SubgradientFn>,
    infimum: f64,
    argmin: Option<ClosedSet>,
}

impl fmt::Debug for SubgradientOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubgradientOracle")
            .field("dim", &self.dim)
            .field("infimum", &self.infimum)
            .field("argmin", &self.argmin)
            .finish_non_exhaustive()
    }
}

impl SubgradientOracle {
    pub fn new(
        dim: usize,
        infimum: f64,
        value: impl Fn(&Point) -> Result<f64> + Send + Sync + 'static,
        subgradients: impl Fn(&Point) -> Result<SubgradientSample> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !infimum.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "infimum must be finite, got {infimum}"
            )));
        }
        Ok(SubgradientOracle {
            dim,
            value: Arc::new(value),
            subgradients: Arc::new(subgradients),
            infimum,
            argmin: None,
        })
    }

    /// Attaches the minimizer set after checking that its sample members sit
    /// in the zero level set of `f - inf f`.
    pub fn with_argmin(mut self, argmin: ClosedSet) -> Result<Self> {
        if argmin.ambient_dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: argmin.ambient_dim(),
            });
        }
        for m in argmin.sample_members() {
            let gap = self.gap(&m)?;
            if gap.abs() > ARGMIN_CHECK_TOL {
                return Err(Error::InvalidParameter(format!(
                    "argmin member {m} has gap {gap}"
                )));
            }
        }
        self.argmin = Some(argmin);
        Ok(self)
    }

    /// Limiting subgradients of a powered distance; `argmin = set`.
    pub fn power_distance(f: &PowerDistance) -> Self {
        let (fv, fs) = (f.clone(), f.clone());
        SubgradientOracle {
            dim: f.dim(),
            value: Arc::new(move |x| fv.value(x)),
            subgradients: Arc::new(move |x| fs.limiting_subdiff(x)),
            infimum: 0.0,
            argmin: Some(f.set().clone()),
        }
    }

    /// Same function, but each sample also carries the minimum-norm Clarke
    /// subgradient, so worst-witness ratios are Clarke ratios.
    pub fn clarke(f: &PowerDistance) -> Self {
        let (fv, fs) = (f.clone(), f.clone());
        SubgradientOracle {
            dim: f.dim(),
            value: Arc::new(move |x| fv.value(x)),
            subgradients: Arc::new(move |x| fs.clarke_subdiff(x)),
            infimum: 0.0,
            argmin: Some(f.set().clone()),
        }
    }

    pub fn smooth(g: &SmoothTestFunction, dim: usize) -> Result<Self> {
        let argmin = g.argmin(dim)?;
        let (gv, gs) = (g.clone(), g.clone());
        SubgradientOracle::new(
            dim,
            0.0,
            move |x| Ok(gv.eval(x)?.value),
            move |x| Ok(SubgradientSample::exact(vec![gs.eval(x)?.gradient])),
        )?
        .with_argmin(argmin)
    }

    pub fn function(f: &Function, dim: usize) -> Result<Self> {
        match f {
            Function::PowerDistance(f) => {
                if f.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: f.dim(),
                        found: dim,
                    });
                }
                Ok(Self::power_distance(f))
            }
            Function::Smooth(g) => Self::smooth(g, dim),
        }
    }

    /// Oracle of `alpha * f` (`alpha > 0`), with the same minimizers.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {alpha}"
            )));
        }
        let (value, subgradients) = (self.value.clone(), self.subgradients.clone());
        Ok(SubgradientOracle {
            dim: self.dim,
            value: Arc::new(move |x| Ok(alpha * value(x)?)),
            subgradients: Arc::new(move |x| {
                let mut s = subgradients(x)?;
                s.vectors = s.vectors.iter().map(|v| v.scale(alpha)).collect();
                Ok(s)
            }),
            infimum: alpha * self.infimum,
            argmin: self.argmin.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn infimum(&self) -> f64 {
        self.infimum
    }

    pub fn argmin(&self) -> Option<&ClosedSet> {
        self.argmin.as_ref()
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        x.ensure_dim(self.dim)?;
        (self.value)(x)
    }

    /// `f(x) - inf f`.
    pub fn gap(&self, x: &Point) -> Result<f64> {
        Ok(self.value(x)? - self.infimum)
    }

    pub fn subgradients(&self, x: &Point) -> Result<SubgradientSample> {
        x.ensure_dim(self.dim)?;
        let s = (self.subgradients)(x)?;
        if s.vectors.is_empty() {
            return Err(Error::EmptyWitnessSet);
        }
        Ok(s)
    }
}
