//! Closed-set catalog with exact distance and projection oracles.
//!
//! Every variant of [`ClosedSet`] is nonempty and closed by construction, so
//! the projection `proj(x) = argmin_{p in set} |p - x|` is always nonempty.
//! Nonconvex variants (spheres, point clouds, parabolas, unions) can have
//! multivalued projections; [`Projection`] reports every minimizer when there
//! are finitely many and a canonical symmetric sample otherwise.

mod cubic;
mod point;

use serde::{Deserialize, Serialize};

pub use cubic::depressed_cubic_roots;
pub use point::{pt, Point};

use crate::{Error, Result};

/// Membership tolerance: `x` belongs to the set when `distance(x) <= TOL_SET`.
pub const TOL_SET: f64 = 1e-10;

/// Orthonormality tolerance for affine-subspace bases.
const TOL_BASIS: f64 = 1e-9;

/// Two candidate projections are tied when their squared distances differ by
/// less than `TIE_REL * (1 + d^2)`.
const TIE_REL: f64 = 1e-12;

/// Closed nonempty subset of `R^N`.
///
/// Construct through the validating constructors or deserialize from JSON;
/// both paths enforce the same invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetSpec", into = "SetSpec")]
pub enum ClosedSet {
    Singleton(Point),
    PointCloud(Vec<Point>),
    Sphere {
        center: Point,
        radius: f64,
    },
    /// The graph `{(t, scale * t^2) : t in R}` in `R^2`.
    ParabolaGraph {
        scale: f64,
    },
    Box {
        lower: Point,
        upper: Point,
    },
    /// `anchor + span(basis)` with an orthonormal basis (possibly empty).
    AffineSubspace {
        anchor: Point,
        basis: Vec<Point>,
    },
    Union(Vec<ClosedSet>),
}

/// Wire format of [`ClosedSet`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Singleton { point: Point },
    PointCloud { points: Vec<Point> },
    Sphere { center: Point, radius: f64 },
    ParabolaGraph { scale: f64 },
    Box { lower: Point, upper: Point },
    AffineSubspace { anchor: Point, basis: Vec<Point> },
    Union { sets: Vec<SetSpec> },
}

impl TryFrom<SetSpec> for ClosedSet {
    type Error = Error;

    fn try_from(spec: SetSpec) -> Result<Self> {
        match spec {
            SetSpec::Singleton { point } => Ok(ClosedSet::Singleton(point)),
            SetSpec::PointCloud { points } => ClosedSet::point_cloud(points),
            SetSpec::Sphere { center, radius } => ClosedSet::sphere(center, radius),
            SetSpec::ParabolaGraph { scale } => ClosedSet::parabola(scale),
            SetSpec::Box { lower, upper } => ClosedSet::boxed(lower, upper),
            SetSpec::AffineSubspace { anchor, basis } => ClosedSet::affine(anchor, basis),
            SetSpec::Union { sets } => {
                let members = sets
                    .into_iter()
                    .map(ClosedSet::try_from)
                    .collect::<Result<Vec<_>>>()?;
                ClosedSet::union(members)
            }
        }
    }
}

impl From<ClosedSet> for SetSpec {
    fn from(set: ClosedSet) -> Self {
        match set {
            ClosedSet::Singleton(point) => SetSpec::Singleton { point },
            ClosedSet::PointCloud(points) => SetSpec::PointCloud { points },
            ClosedSet::Sphere { center, radius } => SetSpec::Sphere { center, radius },
            ClosedSet::ParabolaGraph { scale } => SetSpec::ParabolaGraph { scale },
            ClosedSet::Box { lower, upper } => SetSpec::Box { lower, upper },
            ClosedSet::AffineSubspace { anchor, basis } => {
                SetSpec::AffineSubspace { anchor, basis }
            }
            ClosedSet::Union(members) => SetSpec::Union {
                sets: members.into_iter().map(SetSpec::from).collect(),
            },
        }
    }
}

/// How many points the projection set holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cardinality {
    Singleton,
    /// Finitely many minimizers, all listed.
    FiniteComplete,
    /// Infinitely many minimizers; the representatives are a sample.
    Infinite,
}

/// The projection set of a point onto a [`ClosedSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub representatives: Vec<Point>,
    pub cardinality: Cardinality,
    pub distance: f64,
}

impl Projection {
    fn single(x: &Point, p: Point) -> Self {
        let distance = x.distance(&p);
        Projection {
            representatives: vec![p],
            cardinality: Cardinality::Singleton,
            distance,
        }
    }

    /// Lexicographically smallest representative.
    pub fn first(&self) -> &Point {
        self.representatives
            .iter()
            .min_by(|a, b| a.lex_cmp(b))
            .expect("projection is nonempty")
    }

    pub fn is_singleton(&self) -> bool {
        self.cardinality == Cardinality::Singleton
    }
}

fn tied(best: f64, candidate: f64) -> bool {
    (candidate - best).abs() < TIE_REL * (1.0 + best)
}

fn same_point(a: &Point, b: &Point) -> bool {
    a.distance(b) <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

/// Keeps candidates whose squared distance ties with the minimum, dropping
/// duplicates, in lexicographic order.
fn select_minimizers(x: &Point, candidates: Vec<Point>) -> Projection {
    let sq: Vec<f64> = candidates.iter().map(|c| c.distance_squared(x)).collect();
    let best = sq.iter().copied().fold(f64::INFINITY, f64::min);
    let mut reps: Vec<(f64, Point)> = candidates
        .into_iter()
        .zip(sq)
        .filter(|(_, d2)| tied(best, *d2))
        .map(|(c, d2)| (d2, c))
        .collect();
    reps.sort_by(|a, b| a.1.lex_cmp(&b.1));
    let mut unique: Vec<(f64, Point)> = Vec::with_capacity(reps.len());
    for (d2, c) in reps {
        if !unique.iter().any(|(_, u)| same_point(u, &c)) {
            unique.push((d2, c));
        }
    }
    let distance = unique
        .iter()
        .map(|(d2, _)| *d2)
        .fold(f64::INFINITY, f64::min)
        .sqrt();
    let cardinality = if unique.len() == 1 {
        Cardinality::Singleton
    } else {
        Cardinality::FiniteComplete
    };
    Projection {
        representatives: unique.into_iter().map(|(_, c)| c).collect(),
        cardinality,
        distance,
    }
}

impl ClosedSet {
    pub fn singleton(point: Point) -> Self {
        ClosedSet::Singleton(point)
    }

    pub fn point_cloud(points: Vec<Point>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidSet("point cloud needs at least one point".into()))?;
        let dim = first.dim();
        for p in &points {
            p.ensure_dim(dim)?;
        }
        Ok(ClosedSet::PointCloud(points))
    }

    pub fn sphere(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidSet(format!(
                "sphere radius must be positive and finite, got {radius}"
            )));
        }
        Ok(ClosedSet::Sphere { center, radius })
    }

    pub fn unit_circle() -> Self {
        ClosedSet::Sphere {
            center: Point::zeros(2),
            radius: 1.0,
        }
    }

    pub fn parabola(scale: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::InvalidSet(format!(
                "parabola scale must be nonzero and finite, got {scale}"
            )));
        }
        Ok(ClosedSet::ParabolaGraph { scale })
    }

    pub fn boxed(lower: Point, upper: Point) -> Result<Self> {
        upper.ensure_dim(lower.dim())?;
        if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InvalidSet(format!(
                "box bounds inverted on axis {i}: {} > {}",
                lower[i], upper[i]
            )));
        }
        Ok(ClosedSet::Box { lower, upper })
    }

    pub fn affine(anchor: Point, basis: Vec<Point>) -> Result<Self> {
        let dim = anchor.dim();
        if basis.len() > dim {
            return Err(Error::InvalidSet(format!(
                "{} basis vectors in dimension {dim}",
                basis.len()
            )));
        }
        for (i, u) in basis.iter().enumerate() {
            u.ensure_dim(dim)?;
            for (j, v) in basis.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (u.dot(v) - expected).abs() > TOL_BASIS {
                    return Err(Error::InvalidSet(format!(
                        "affine basis is not orthonormal at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(ClosedSet::AffineSubspace { anchor, basis })
    }

    pub fn union(members: Vec<ClosedSet>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidSet("union needs at least one member".into()))?;
        let dim = first.ambient_dim();
        for m in &members {
            if m.ambient_dim() != dim {
                return Err(Error::InvalidSet(format!(
                    "union members disagree on dimension: {dim} vs {}",
                    m.ambient_dim()
                )));
            }
        }
        Ok(ClosedSet::Union(members))
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            ClosedSet::Singleton(p) => p.dim(),
            ClosedSet::PointCloud(ps) => ps[0].dim(),
            ClosedSet::Sphere { center, .. } => center.dim(),
            ClosedSet::ParabolaGraph { .. } => 2,
            ClosedSet::Box { lower, .. } => lower.dim(),
            ClosedSet::AffineSubspace { anchor, .. } => anchor.dim(),
            ClosedSet::Union(members) => members[0].ambient_dim(),
        }
    }

    /// True for the variants that are convex regardless of parameters.
    pub fn is_convex(&self) -> bool {
        matches!(
            self,
            ClosedSet::Singleton(_) | ClosedSet::Box { .. } | ClosedSet::AffineSubspace { .. }
        )
    }

    pub fn distance(&self, x: &Point) -> Result<f64> {
        Ok(self.project(x)?.distance)
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        Ok(self.distance(x)? <= TOL_SET)
    }

    pub fn project(&self, x: &Point) -> Result<Projection> {
        x.ensure_dim(self.ambient_dim())?;
        Ok(self.project_unchecked(x))
    }

    fn project_unchecked(&self, x: &Point) -> Projection {
        match self {
            ClosedSet::Singleton(a) => Projection::single(x, a.clone()),
            ClosedSet::PointCloud(points) => select_minimizers(x, points.clone()),
            ClosedSet::Sphere { center, radius } => project_sphere(x, center, *radius),
            ClosedSet::ParabolaGraph { scale } => project_parabola(x, *scale),
            ClosedSet::Box { lower, upper } => {
                let clamped = (0..x.dim())
                    .map(|i| x[i].clamp(lower[i], upper[i]))
                    .collect();
                Projection::single(x, Point::from_raw(clamped))
            }
            ClosedSet::AffineSubspace { anchor, basis } => {
                let offset = x.sub(anchor);
                let p = basis
                    .iter()
                    .fold(anchor.clone(), |acc, u| acc.add(&u.scale(offset.dot(u))));
                Projection::single(x, p)
            }
            ClosedSet::Union(members) => project_union(x, members),
        }
    }

    /// A few points known to lie in the set, used for spot checks.
    pub fn sample_members(&self) -> Vec<Point> {
        match self {
            ClosedSet::Singleton(a) => vec![a.clone()],
            ClosedSet::PointCloud(points) => points.clone(),
            ClosedSet::Sphere { center, radius } => (0..center.dim())
                .flat_map(|i| {
                    [1.0, -1.0].map(|s| center.add(&Point::axis(center.dim(), i, s * radius)))
                })
                .collect(),
            ClosedSet::ParabolaGraph { scale } => [-1.0, 0.0, 1.0]
                .iter()
                .map(|&t| Point::from_raw(vec![t, scale * t * t]))
                .collect(),
            ClosedSet::Box { lower, upper } => {
                vec![lower.clone(), upper.clone(), lower.lerp(upper, 0.5)]
            }
            ClosedSet::AffineSubspace { anchor, basis } => {
                let mut out = vec![anchor.clone()];
                out.extend(basis.iter().map(|u| anchor.add(u)));
                out
            }
            ClosedSet::Union(members) => members.iter().flat_map(|m| m.sample_members()).collect(),
        }
    }
}

fn project_sphere(x: &Point, center: &Point, radius: f64) -> Projection {
    let offset = x.sub(center);
    let r = offset.norm();
    if r > 0.0 {
        let p = center.add(&offset.scale(radius / r));
        // |x - p| = |r - radius| exactly along the ray
        let mut proj = Projection::single(x, p);
        proj.distance = (r - radius).abs();
        return proj;
    }
    let dim = center.dim();
    let mut representatives: Vec<Point> = (0..dim)
        .flat_map(|i| [-1.0, 1.0].map(|s| center.add(&Point::axis(dim, i, s * radius))))
        .collect();
    representatives.sort_by(|a, b| a.lex_cmp(b));
    let cardinality = if dim == 1 {
        // the 0-sphere {c - r, c + r} is finite
        Cardinality::FiniteComplete
    } else {
        Cardinality::Infinite
    };
    Projection {
        representatives,
        cardinality,
        distance: radius,
    }
}

/// Nearest points on `{(t, a t^2)}`: the stationarity condition of
/// `(t - x1)^2 + (a t^2 - x2)^2` is `2a^2 t^3 + (1 - 2 a x2) t - x1 = 0`.
fn project_parabola(x: &Point, a: f64) -> Projection {
    let (x1, x2) = (x[0], x[1]);
    let lead = 2.0 * a * a;
    let roots = depressed_cubic_roots((1.0 - 2.0 * a * x2) / lead, -x1 / lead);
    let candidates = roots
        .into_iter()
        .map(|t| Point::from_raw(vec![t, a * t * t]))
        .collect();
    select_minimizers(x, candidates)
}

fn project_union(x: &Point, members: &[ClosedSet]) -> Projection {
    let projections: Vec<Projection> = members.iter().map(|m| m.project_unchecked(x)).collect();
    let best = projections
        .iter()
        .map(|p| p.distance)
        .fold(f64::INFINITY, f64::min);
    let active: Vec<&Projection> = projections
        .iter()
        .filter(|p| tied(best * best, p.distance * p.distance))
        .collect();
    let infinite = active
        .iter()
        .any(|p| p.cardinality == Cardinality::Infinite);
    let mut reps: Vec<Point> = Vec::new();
    for p in &active {
        for r in &p.representatives {
            if !reps.iter().any(|u| same_point(u, r)) {
                reps.push(r.clone());
            }
        }
    }
    reps.sort_by(|a, b| a.lex_cmp(b));
    let cardinality = if infinite {
        Cardinality::Infinite
    } else if reps.len() == 1 {
        Cardinality::Singleton
    } else {
        Cardinality::FiniteComplete
    };
    Projection {
        representatives: reps,
        cardinality,
        distance: best,
    }
}
