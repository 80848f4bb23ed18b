use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::setlib::Point;
use crate::{Error, Result};

pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-8;

fn default_exclusion() -> f64 {
    DEFAULT_EXCLUSION_RADIUS
}

/// Where to sample, and how close to the minimizer set to skip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    #[serde(flatten)]
    pub mode: SamplingMode,
    /// Samples with `d_argmin < exclusion_radius` are skipped.
    #[serde(default = "default_exclusion")]
    pub exclusion_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SamplingMode {
    /// Tensor grid, `points_per_axis` evenly spaced values per axis including
    /// both endpoints. The first axis varies fastest.
    Grid {
        bounds: Vec<[f64; 2]>,
        points_per_axis: usize,
    },
    /// `count` independent uniform draws from a seeded ChaCha8 stream.
    RandomUniform {
        bounds: Vec<[f64; 2]>,
        count: usize,
        seed: u64,
    },
}

impl SamplingPlan {
    pub fn grid(bounds: Vec<[f64; 2]>, points_per_axis: usize) -> Self {
        SamplingPlan {
            mode: SamplingMode::Grid {
                bounds,
                points_per_axis,
            },
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }

    /// `points_per_axis^2` grid on `[lo, hi]^2`.
    pub fn square_grid(lo: f64, hi: f64, points_per_axis: usize) -> Self {
        Self::grid(vec![[lo, hi]; 2], points_per_axis)
    }

    pub fn random(bounds: Vec<[f64; 2]>, count: usize, seed: u64) -> Self {
        SamplingPlan {
            mode: SamplingMode::RandomUniform {
                bounds,
                count,
                seed,
            },
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }

    pub fn with_exclusion_radius(mut self, radius: f64) -> Self {
        self.exclusion_radius = radius;
        self
    }

    pub fn bounds(&self) -> &[[f64; 2]] {
        match &self.mode {
            SamplingMode::Grid { bounds, .. } | SamplingMode::RandomUniform { bounds, .. } => {
                bounds
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds().len()
    }

    fn validate(&self) -> Result<()> {
        let bounds = self.bounds();
        if bounds.is_empty() {
            return Err(Error::InvalidParameter(
                "sampling plan needs at least one axis".into(),
            ));
        }
        for (i, [lo, hi]) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidParameter(format!(
                    "sampling bounds on axis {i} must satisfy lo <= hi, got [{lo}, {hi}]"
                )));
            }
        }
        if !(self.exclusion_radius >= 0.0 && self.exclusion_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exclusion radius must be nonnegative, got {}",
                self.exclusion_radius
            )));
        }
        Ok(())
    }

    /// The sample points in a deterministic order.
    pub fn points(&self) -> Result<Vec<Point>> {
        self.validate()?;
        match &self.mode {
            SamplingMode::Grid {
                bounds,
                points_per_axis,
            } => Ok(grid_points(bounds, *points_per_axis)),
            SamplingMode::RandomUniform {
                bounds,
                count,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|_| {
                        let coords = bounds
                            .iter()
                            .map(|&[lo, hi]| if lo == hi { lo } else { rng.gen_range(lo..hi) })
                            .collect();
                        Point::from_raw(coords)
                    })
                    .collect())
            }
        }
    }
}

/// `i`-th of `n` evenly spaced values on `[lo, hi]`, endpoints exact.
pub fn linspace_value(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    match n {
        0 => unreachable!("empty linspace"),
        1 => 0.5 * (lo + hi),
        _ if i + 1 == n => hi,
        _ => lo + (hi - lo) * (i as f64) / ((n - 1) as f64),
    }
}

fn grid_points(bounds: &[[f64; 2]], n: usize) -> Vec<Point> {
    if n == 0 {
        return Vec::new();
    }
    let dim = bounds.len();
    let total = n.pow(dim as u32);
    (0..total)
        .map(|mut flat| {
            let coords = bounds
                .iter()
                .map(|&[lo, hi]| {
                    let i = flat % n;
                    flat /= n;
                    linspace_value(lo, hi, n, i)
                })
                .collect();
            Point::from_raw(coords)
        })
        .collect()
}
