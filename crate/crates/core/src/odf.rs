//! Oriented distance fields and pointwise field algebra.

use log::warn;

use crate::edt::distance_transform;
use crate::error::{Error, Result};
use crate::grid::{BinaryMask, GridSpec, ScalarField};

/// Tolerance for weights summing to one.
const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Slack allowed before an input field is reported as non-Lipschitz.
pub const LIPSCHITZ_SLACK: f64 = 1e-6;

/// `d_A - d_{A^c}` at every cell center: negative inside, positive outside.
///
/// Under the cell-center convention no value is exactly zero: member cells
/// sit at least one spacing away from the nearest non-member.
pub fn oriented_distance_field(mask: &BinaryMask) -> Result<ScalarField> {
    if mask.is_empty() || mask.is_full() {
        return Err(Error::DegenerateSet);
    }
    let inside = distance_transform(mask)?;
    let outside = distance_transform(&mask.complement())?;
    inside.sub(&outside)
}

/// Cells where `field <= level`.
pub fn sublevel_mask(field: &ScalarField, level: f64) -> BinaryMask {
    let bits = field.values().iter().map(|&v| v <= level).collect();
    BinaryMask::new(*field.grid(), bits).expect("shape preserved")
}

/// Cells where `field >= level`.
pub fn superlevel_mask(field: &ScalarField, level: f64) -> BinaryMask {
    let bits = field.values().iter().map(|&v| v >= level).collect();
    BinaryMask::new(*field.grid(), bits).expect("shape preserved")
}

pub(crate) fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::BadWeights(format!("{} weights for {n} fields", weights.len())));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::BadWeights("weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::BadWeights(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Pointwise convex combination `sum_k w_k f_k`.
pub fn weighted_mean_fields(fields: &[ScalarField], weights: &[f64]) -> Result<ScalarField> {
    let first = fields.first().ok_or(Error::EmptyInput)?;
    check_weights(weights, fields.len())?;
    let grid = *first.grid();
    let mut acc = MeanAccumulator::new(grid);
    for (f, &w) in fields.iter().zip(weights) {
        acc.add(f, w)?;
    }
    Ok(acc.sum_field())
}

/// Uniform weights `1/m`.
pub fn uniform_weights(m: usize) -> Vec<f64> {
    vec![1.0 / m as f64; m]
}

/// Running weighted sum of fields on one grid.
///
/// Lets a mean be formed without holding every realization in memory.
#[derive(Debug, Clone)]
pub struct MeanAccumulator {
    grid: GridSpec,
    sum: Vec<f64>,
    total_weight: f64,
    count: usize,
}

impl MeanAccumulator {
    pub fn new(grid: GridSpec) -> Self {
        Self { grid, sum: vec![0.0; grid.len()], total_weight: 0.0, count: 0 }
    }

    pub fn add(&mut self, field: &ScalarField, weight: f64) -> Result<()> {
        self.grid.ensure_same(field.grid())?;
        for (s, v) in self.sum.iter_mut().zip(field.values()) {
            *s += weight * v;
        }
        self.total_weight += weight;
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// The raw weighted sum (equal to the mean when weights sum to one).
    pub fn sum_field(&self) -> ScalarField {
        ScalarField::from_raw(self.grid, self.sum.clone())
    }

    /// Sum divided by the accumulated weight.
    pub fn mean(&self) -> Result<ScalarField> {
        if self.count == 0 || self.total_weight <= 0.0 {
            return Err(Error::EmptyInput);
        }
        let w = self.total_weight;
        ScalarField::new(self.grid, self.sum.iter().map(|s| s / w).collect())
    }
}

/// Largest excess of `|f(p) - f(q)|` over `|p - q|` among 8-neighbors.
///
/// Values are first moved half a spacing toward zero. Member and
/// non-member cell centers straddle the boundary, so a grid ODF jumps by
/// `2h` between them; after the shift it is 1-Lipschitz on 8-neighbors,
/// and any continuum ODF sampled at the centers stays 1-Lipschitz too.
pub fn lipschitz_excess(field: &ScalarField) -> f64 {
    let g = field.grid();
    let h = g.spacing;
    let half = 0.5 * h;
    let diag = h * std::f64::consts::SQRT_2;
    let at = |i: usize, j: usize| {
        let v = field.get(i, j);
        if v > 0.0 {
            (v - half).max(0.0)
        } else if v < 0.0 {
            (v + half).min(0.0)
        } else {
            0.0
        }
    };
    let mut worst = f64::NEG_INFINITY;
    for i in 0..g.rows {
        for j in 0..g.cols {
            let v = at(i, j);
            let mut probe = |ii: usize, jj: usize, d: f64| {
                worst = worst.max((v - at(ii, jj)).abs() - d);
            };
            if j + 1 < g.cols {
                probe(i, j + 1, h);
            }
            if i + 1 < g.rows {
                probe(i + 1, j, h);
                if j + 1 < g.cols {
                    probe(i + 1, j + 1, diag);
                }
                if j > 0 {
                    probe(i + 1, j - 1, diag);
                }
            }
        }
    }
    worst.max(0.0)
}

/// Logs a warning for every field that is not 1-Lipschitz between neighbors.
pub(crate) fn warn_non_lipschitz(fields: &[ScalarField]) {
    for (k, f) in fields.iter().enumerate() {
        let excess = lipschitz_excess(f);
        if excess > LIPSCHITZ_SLACK {
            warn!("input field {k} is not 1-Lipschitz (excess {excess:.3e}); is it an ODF?");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(grid: GridSpec, c: [f64; 2], r: f64) -> BinaryMask {
        BinaryMask::from_fn(grid, |x| (x[0] - c[0]).hypot(x[1] - c[1]) <= r)
    }

    #[test]
    fn half_plane_profile() {
        let h = 0.5;
        let g = GridSpec::new([0.0, 0.0], h, 3, 10).unwrap();
        let k = 4;
        let m = BinaryMask::from_fn(g, |x| x[0] < h * (k as f64 + 1.0));
        let b = oriented_distance_field(&m).unwrap();
        for j in 0..10 {
            let expected = if j <= k { -h * (k + 1 - j) as f64 } else { h * (j - k) as f64 };
            assert_eq!(b.get(1, j), expected, "column {j}");
        }
    }

    #[test]
    fn degenerate_masks_rejected() {
        let g = GridSpec::pixels(4, 4).unwrap();
        assert!(matches!(oriented_distance_field(&BinaryMask::full(g)), Err(Error::DegenerateSet)));
        assert!(matches!(oriented_distance_field(&BinaryMask::empty(g)), Err(Error::DegenerateSet)));
    }

    #[test]
    fn disc_close_to_closed_form_and_round_trips() {
        let g = GridSpec::new([-2.0, -2.0], 0.02, 200, 200).unwrap();
        let m = disc(g, [0.1, -0.2], 1.0);
        let b = oriented_distance_field(&m).unwrap();
        let worst = g
            .cells()
            .map(|(i, j, x)| (b.get(i, j) - ((x[0] - 0.1).hypot(x[1] + 0.2) - 1.0)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= g.spacing, "worst {worst}");
        assert!(b.values().iter().all(|&v| v != 0.0));
        assert_eq!(sublevel_mask(&b, 0.0), m);
    }

    #[test]
    fn complement_negates_exactly() {
        let g = GridSpec::pixels(13, 9).unwrap();
        let m = disc(g, [4.0, 6.0], 3.2);
        let b = oriented_distance_field(&m).unwrap();
        let bc = oriented_distance_field(&m.complement()).unwrap();
        assert!(b.values().iter().zip(bc.values()).all(|(a, c)| *a == -*c));
    }

    #[test]
    fn sublevel_extremes() {
        let g = GridSpec::pixels(4, 5).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0] - 2.0 * x[1]).unwrap();
        assert!(sublevel_mask(&f, f.max()).is_full());
        assert!(sublevel_mask(&f, f.min() - 1.0).is_empty());
    }

    #[test]
    fn weighted_mean_identity_and_half_planes() {
        let g = GridSpec::new([-3.0, -1.0], 0.25, 8, 24).unwrap();
        let plane = |t: f64| ScalarField::from_fn(g, move |x| x[0] - t).unwrap();
        let one = weighted_mean_fields(&[plane(0.3)], &[1.0]).unwrap();
        assert_eq!(one, plane(0.3));
        let mean = weighted_mean_fields(&[plane(0.0), plane(2.0)], &[0.5, 0.5]).unwrap();
        for (a, b) in mean.values().iter().zip(plane(1.0).values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_mean_errors() {
        let g = GridSpec::pixels(2, 2).unwrap();
        let g2 = GridSpec::pixels(2, 3).unwrap();
        let f = ScalarField::constant(g, 1.0).unwrap();
        let f2 = ScalarField::constant(g2, 1.0).unwrap();
        assert!(matches!(weighted_mean_fields(&[f.clone(), f2], &[0.5, 0.5]), Err(Error::GridMismatch)));
        assert!(matches!(weighted_mean_fields(&[f.clone(), f.clone()], &[0.5, 0.6]), Err(Error::BadWeights(_))));
        assert!(matches!(weighted_mean_fields(&[f.clone(), f.clone()], &[1.5, -0.5]), Err(Error::BadWeights(_))));
        assert!(matches!(weighted_mean_fields(&[f], &[0.5, 0.5]), Err(Error::BadWeights(_))));
    }

    #[test]
    fn lipschitz_excess_detects_steep_fields() {
        let g = GridSpec::pixels(6, 6).unwrap();
        let ok = ScalarField::from_fn(g, |x| x[0] - 3.0).unwrap();
        let steep = ScalarField::from_fn(g, |x| 2.0 * x[0]).unwrap();
        assert_eq!(lipschitz_excess(&ok), 0.0);
        assert!(lipschitz_excess(&steep) > 0.9);
        let disc = BinaryMask::from_fn(g, |x| (x[0] - 3.0).hypot(x[1] - 2.5) <= 1.7);
        assert!(lipschitz_excess(&oriented_distance_field(&disc).unwrap()) < 1e-12);
    }
}
