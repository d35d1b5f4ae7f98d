use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shape::{polar_angle, DiscBranch, ParametricShape, SetBranch};
use crate::error::{Error, Result};
use crate::grid::{BinaryMask, GridSpec, ScalarField};

/// A parametric shape with its generating parameter left open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeFamily {
    /// Parameter: the point (2 coordinates).
    Singleton,
    /// Parameter: the radius.
    Ball { center: [f64; 2] },
    /// Parameter: the offset of the vertical boundary line.
    HalfPlane,
    /// Parameter: the boundary angle.
    UpperHalfPlane,
    /// Parameter: 1 selects the disc at the origin, 0 the disc at `a`.
    FlashingDisc { a: [f64; 2], r: f64 },
    /// Parameter: 1 selects the boundary of `base`, 0 the set itself.
    SetOrBoundary { base: ParametricShape },
}

impl ShapeFamily {
    pub fn param_dim(&self) -> usize {
        match self {
            Self::Singleton => 2,
            _ => 1,
        }
    }

    /// Families whose parameter is a 0/1 branch selector.
    pub fn is_two_branch(&self) -> bool {
        matches!(self, Self::FlashingDisc { .. } | Self::SetOrBoundary { .. })
    }

    pub fn instantiate(&self, theta: &[f64]) -> Result<ParametricShape> {
        if theta.len() != self.param_dim() {
            return Err(Error::DimMismatch { expected: self.param_dim(), got: theta.len() });
        }
        let branch = |t: f64| -> Result<bool> {
            if t == 1.0 {
                Ok(true)
            } else if t == 0.0 {
                Ok(false)
            } else {
                Err(Error::InvalidModel(format!("branch parameter must be 0 or 1, got {t}")))
            }
        };
        let shape = match self {
            Self::Singleton => ParametricShape::Singleton { point: [theta[0], theta[1]] },
            Self::Ball { center } => ParametricShape::Ball { center: *center, radius: theta[0] },
            Self::HalfPlane => ParametricShape::HalfPlane { offset: theta[0] },
            Self::UpperHalfPlane => ParametricShape::UpperHalfPlane { angle: theta[0] },
            Self::FlashingDisc { a, r } => ParametricShape::FlashingDisc {
                a: *a,
                r: *r,
                branch: if branch(theta[0])? { DiscBranch::Origin } else { DiscBranch::Shifted },
            },
            Self::SetOrBoundary { base } => ParametricShape::SetOrBoundary {
                base: Box::new(base.clone()),
                branch: if branch(theta[0])? { SetBranch::Boundary } else { SetBranch::Set },
            },
        };
        shape.validate()?;
        Ok(shape)
    }
}

/// Distribution of the generating parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum ParameterLaw {
    PointMass { value: Vec<f64> },
    /// Independent uniforms, one per coordinate.
    Uniform { lower: Vec<f64>, upper: Vec<f64> },
    /// 1 with probability `p`, else 0.
    Bernoulli { p: f64 },
    Discrete { values: Vec<Vec<f64>>, probs: Vec<f64> },
}

impl ParameterLaw {
    pub fn uniform(lower: f64, upper: f64) -> Self {
        Self::Uniform { lower: vec![lower], upper: vec![upper] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::PointMass { value } => value.len(),
            Self::Uniform { lower, .. } => lower.len(),
            Self::Bernoulli { .. } => 1,
            Self::Discrete { values, .. } => values.first().map_or(0, Vec::len),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        match self {
            Self::PointMass { value } => {
                if value.is_empty() || value.iter().any(|v| !v.is_finite()) {
                    return bad("point mass needs a finite, non-empty value".into());
                }
            }
            Self::Uniform { lower, upper } => {
                if lower.is_empty() || lower.len() != upper.len() {
                    return bad("uniform bounds must be non-empty and of equal length".into());
                }
                if lower.iter().zip(upper).any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
                    return bad("uniform law needs finite lower < upper in every coordinate".into());
                }
            }
            Self::Bernoulli { p } => {
                if !(0.0..=1.0).contains(p) {
                    return bad(format!("bernoulli p must lie in [0, 1], got {p}"));
                }
            }
            Self::Discrete { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return bad("discrete law needs one probability per value".into());
                }
                let d = values[0].len();
                if d == 0 || values.iter().any(|v| v.len() != d || v.iter().any(|x| !x.is_finite())) {
                    return bad("discrete values must be finite vectors of one length".into());
                }
                if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return bad("discrete probabilities must lie in [0, 1]".into());
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return bad(format!("discrete probabilities sum to {total}"));
                }
            }
        }
        Ok(())
    }

    /// Atoms and their probabilities when the support is finite.
    pub fn atoms(&self) -> Option<Vec<(Vec<f64>, f64)>> {
        match self {
            Self::PointMass { value } => Some(vec![(value.clone(), 1.0)]),
            Self::Bernoulli { p } => Some(vec![(vec![1.0], *p), (vec![0.0], 1.0 - p)]),
            Self::Discrete { values, probs } => Some(values.iter().cloned().zip(probs.iter().copied()).collect()),
            Self::Uniform { .. } => None,
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        match self {
            Self::Uniform { lower, upper } => lower.iter().zip(upper).map(|(a, b)| 0.5 * (a + b)).collect(),
            _ => {
                let atoms = self.atoms().expect("finite support");
                let mut m = vec![0.0; self.dim()];
                for (v, p) in atoms {
                    for (acc, x) in m.iter_mut().zip(v) {
                        *acc += p * x;
                    }
                }
                m
            }
        }
    }

    /// Coordinate-wise bounds of the support.
    pub fn support_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Self::Uniform { lower, upper } => (lower.clone(), upper.clone()),
            _ => {
                let atoms = self.atoms().expect("finite support");
                let d = self.dim();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for (v, p) in atoms {
                    if p == 0.0 {
                        continue;
                    }
                    for k in 0..d {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Self::PointMass { value } => value.clone(),
            Self::Uniform { lower, upper } => {
                lower.iter().zip(upper).map(|(&a, &b)| rng.random_range(a..b)).collect()
            }
            Self::Bernoulli { p } => vec![if rng.random::<f64>() < *p { 1.0 } else { 0.0 }],
            Self::Discrete { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return v.clone();
                    }
                }
                values.iter().zip(probs).rev().find(|(_, &p)| p > 0.0).map(|(v, _)| v.clone()).unwrap()
            }
        }
    }
}

/// Independent random stream number `stream` under `seed`.
///
/// ChaCha8 keyed by the seed with the stream id as nonce: draw `i` does not
/// depend on whether draws `0..i` were ever made, so parallel evaluation
/// reproduces sequential output exactly.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Distribution over parametric shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSetModel {
    pub family: ShapeFamily,
    pub law: ParameterLaw,
    pub seed: u64,
}

impl RandomSetModel {
    pub fn new(family: ShapeFamily, law: ParameterLaw, seed: u64) -> Result<Self> {
        let model = Self { family, law, seed };
        model.validate()?;
        Ok(model)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.law.validate()?;
        if self.law.dim() != self.family.param_dim() {
            return Err(Error::InvalidModel(format!(
                "law has dimension {} but the family needs {}",
                self.law.dim(),
                self.family.param_dim()
            )));
        }
        match (&self.law, self.family.is_two_branch()) {
            (ParameterLaw::Uniform { .. }, true) => {
                return Err(Error::InvalidModel("two-branch families need a 0/1 parameter law".into()))
            }
            (ParameterLaw::Bernoulli { .. }, false) => {
                return Err(Error::InvalidModel("bernoulli laws select between two shapes only".into()))
            }
            _ => {}
        }
        // Every atom, or both ends of a uniform box, must give a valid shape.
        match self.law.atoms() {
            Some(atoms) => {
                for (v, _) in atoms {
                    self.family.instantiate(&v)?;
                }
            }
            None => {
                let (lo, hi) = self.law.support_box();
                self.family.instantiate(&lo)?;
                self.family.instantiate(&hi)?;
                if self.family == ShapeFamily::UpperHalfPlane && lo[0] <= -std::f64::consts::FRAC_PI_2 {
                    return Err(Error::InvalidModel("angles must exceed -pi/2".into()));
                }
            }
        }
        Ok(())
    }

    /// Parameter of draw `index`.
    pub fn draw(&self, index: u64) -> Vec<f64> {
        self.law.sample(&mut stream_rng(self.seed, index))
    }

    pub fn sample_parameters(&self, m: usize) -> Vec<Vec<f64>> {
        (0..m as u64).map(|i| self.draw(i)).collect()
    }

    pub fn realization(&self, index: u64) -> Result<ParametricShape> {
        self.family.instantiate(&self.draw(index))
    }

    /// Bounding box of the shapes the model can produce. Unbounded families
    /// get a box that frames their boundaries.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let (lo, hi) = self.law.support_box();
        match &self.family {
            ShapeFamily::Singleton => ([lo[0], lo[1]], [hi[0], hi[1]]),
            ShapeFamily::Ball { center } => {
                let r = hi[0];
                ([center[0] - r, center[1] - r], [center[0] + r, center[1] + r])
            }
            ShapeFamily::HalfPlane => {
                let half = 0.5 * (hi[0] - lo[0]) + 1.0;
                let mid = 0.5 * (lo[0] + hi[0]);
                ([mid - half, -half], [mid + half, half])
            }
            ShapeFamily::UpperHalfPlane => ([-1.0, -1.0], [1.0, 1.0]),
            ShapeFamily::FlashingDisc { a, r } => (
                [a[0].min(0.0) - r, a[1].min(0.0) - r],
                [a[0].max(0.0) + r, a[1].max(0.0) + r],
            ),
            ShapeFamily::SetOrBoundary { base } => shape_box(base),
        }
    }

    /// Square `n x n` grid framing [`Self::bounding_box`] with a 25% margin.
    pub fn default_grid(&self, n: usize) -> Result<GridSpec> {
        let (lo, hi) = self.bounding_box();
        GridSpec::covering(lo, hi, n, 0.25)
    }
}

fn shape_box(shape: &ParametricShape) -> ([f64; 2], [f64; 2]) {
    match shape {
        ParametricShape::Singleton { point } => (*point, *point),
        ParametricShape::Ball { center, radius } => (
            [center[0] - radius, center[1] - radius],
            [center[0] + radius, center[1] + radius],
        ),
        ParametricShape::HalfPlane { offset } => ([offset - 1.0, -1.0], [offset + 1.0, 1.0]),
        ParametricShape::UpperHalfPlane { .. } => ([-1.0, -1.0], [1.0, 1.0]),
        ParametricShape::FlashingDisc { a, r, .. } => (
            [a[0].min(0.0) - r, a[1].min(0.0) - r],
            [a[0].max(0.0) + r, a[1].max(0.0) + r],
        ),
        ParametricShape::Interval { lo, hi } => {
            let half = 0.5 * (hi - lo);
            ([*lo, -half], [*hi, half])
        }
        ParametricShape::SetOrBoundary { base, .. } => shape_box(base),
    }
}

/// Exact expected oriented distance `E b(x)` for the catalogued models.
///
/// Finite-support laws are summed atom by atom; uniform laws have closed
/// forms for the ball, half-plane and upper half-plane families.
pub fn expected_odf_closed_form(model: &RandomSetModel, x: [f64; 2]) -> Result<f64> {
    let norm = |v: [f64; 2]| v[0].hypot(v[1]);
    match (&model.family, &model.law) {
        (ShapeFamily::FlashingDisc { a, r }, ParameterLaw::Bernoulli { p }) => {
            Ok(p * norm(x) + (1.0 - p) * norm([x[0] - a[0], x[1] - a[1]]) - r)
        }
        (ShapeFamily::SetOrBoundary { base }, ParameterLaw::Bernoulli { p }) => {
            let b = base.odf(x);
            Ok(if b > 0.0 {
                b
            } else if b == 0.0 {
                0.0
            } else {
                (1.0 - 2.0 * p) * b
            })
        }
        (family, law) => {
            if let Some(atoms) = law.atoms() {
                let mut total = 0.0;
                for (theta, p) in atoms {
                    if p > 0.0 {
                        total += p * family.instantiate(&theta)?.odf(x);
                    }
                }
                return Ok(total);
            }
            let ParameterLaw::Uniform { lower, upper } = law else { unreachable!() };
            let (a, b) = (lower[0], upper[0]);
            match family {
                ShapeFamily::Ball { center } => Ok(norm([x[0] - center[0], x[1] - center[1]]) - 0.5 * (a + b)),
                ShapeFamily::HalfPlane => Ok(x[0] - 0.5 * (a + b)),
                ShapeFamily::UpperHalfPlane => {
                    let r = norm(x);
                    if r == 0.0 {
                        return Ok(0.0);
                    }
                    let omega = polar_angle(x);
                    Ok(2.0 / (b - a) * (0.5 * (b - a)).sin() * r * (0.5 * (a + b) - omega).sin())
                }
                other => Err(Error::NoClosedForm(format!("{other:?} under a uniform law"))),
            }
        }
    }
}

/// Rasterizes a shape: membership of each cell center and its exact ODF.
pub fn render(shape: &ParametricShape, grid: GridSpec) -> (BinaryMask, ScalarField) {
    let values: Vec<f64> = grid.cells().map(|(_, _, x)| shape.odf(x)).collect();
    let mask = BinaryMask::new(grid, values.iter().map(|&v| v <= 0.0).collect()).expect("shape preserved");
    (mask, ScalarField::from_raw(grid, values))
}

/// `m` seeded draws, each rendered as (mask, closed-form ODF field).
pub fn sample_realizations(
    model: &RandomSetModel,
    m: usize,
    grid: GridSpec,
) -> Result<Vec<(BinaryMask, ScalarField)>> {
    if m == 0 {
        return Err(Error::EmptyInput);
    }
    (0..m as u64)
        .into_par_iter()
        .map(|i| Ok(render(&model.realization(i)?, grid)))
        .collect()
}
