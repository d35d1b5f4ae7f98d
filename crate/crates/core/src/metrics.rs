//! Losses between sets and between ODFs, with cell-sum quadrature.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{zero_isocontour, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::grid::{dist, BinaryMask, Polyline, ScalarField, Window};
use crate::odf::oriented_distance_field;

/// `lambda(A xor B)`: differing cells times the cell area.
pub fn symmetric_difference(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    Ok(a.symmetric_difference(b)?.measure())
}

/// `||chi_A - chi_B||_{L^q}`.
pub fn lq_char_distance(a: &BinaryMask, b: &BinaryMask, q: f64) -> Result<f64> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::BadConfig(format!("q must be a finite real >= 1, got {q}")));
    }
    Ok(symmetric_difference(a, b)?.powf(1.0 / q))
}

/// Discrete `L^2` distance over `window` (full grid when `None`).
pub fn l2_odf_distance(a: &ScalarField, b: &ScalarField, window: Option<Window>) -> Result<f64> {
    let g = *a.grid();
    g.ensure_same(b.grid())?;
    let w = window.unwrap_or_else(|| Window::full(&g));
    w.validate(&g)?;
    let sum: f64 = w
        .indices(&g)
        .map(|k| {
            let d = a.values()[k] - b.values()[k];
            d * d
        })
        .sum();
    Ok((sum * g.cell_area()).sqrt())
}

/// Symmetric Hausdorff distance between two boundaries, each densified to
/// vertex spacing at most `step`.
pub fn hausdorff_boundary(p: &[Polyline], q: &[Polyline], step: f64) -> Result<f64> {
    let dense = |lines: &[Polyline]| -> Vec<[f64; 2]> { lines.iter().flat_map(|l| l.densify(step)).collect() };
    let (a, b) = (dense(p), dense(q));
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    Ok(directed(&a, &b).max(directed(&b, &a)))
}

fn directed(from: &[[f64; 2]], to: &[[f64; 2]]) -> f64 {
    from.par_iter()
        .map(|x| to.iter().map(|y| dist(*x, *y)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

/// All losses between an estimate and a reference set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub symmetric_difference_area: f64,
    pub lq_char_distance: f64,
    pub q_norm: f64,
    /// `None` when either set is empty or fills the grid.
    pub l2_odf_distance: Option<f64>,
    pub misclassification_fraction: f64,
    /// `None` when either boundary is empty.
    pub hausdorff_boundary: Option<f64>,
}

impl MetricReport {
    /// Column order of [`Self::csv_row`].
    pub const CSV_HEADER: &'static str = "symmetric_difference_area,lq_char_distance,q_norm,l2_odf_distance,misclassification_fraction,hausdorff_boundary";

    pub fn compute(a: &BinaryMask, b: &BinaryMask, q: f64) -> Result<Self> {
        let sd = symmetric_difference(a, b)?;
        let lq = lq_char_distance(a, b, q)?;
        let odfs = oriented_distance_field(a).ok().zip(oriented_distance_field(b).ok());
        let l2 = match &odfs {
            Some((fa, fb)) => Some(l2_odf_distance(fa, fb, None)?),
            None => None,
        };
        let hausdorff = odfs.and_then(|(fa, fb)| {
            let step = 0.5 * a.grid().spacing;
            hausdorff_boundary(
                &zero_isocontour(&fa, DEFAULT_TOLERANCE),
                &zero_isocontour(&fb, DEFAULT_TOLERANCE),
                step,
            )
            .ok()
        });
        Ok(Self {
            symmetric_difference_area: sd,
            lq_char_distance: lq,
            q_norm: q,
            l2_odf_distance: l2,
            misclassification_fraction: sd / a.grid().area(),
            hausdorff_boundary: hausdorff,
        })
    }

    /// One CSV line in [`Self::CSV_HEADER`] order; missing values are empty.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.symmetric_difference_area,
            self.lq_char_distance,
            self.q_norm,
            opt(self.l2_odf_distance),
            self.misclassification_fraction,
            opt(self.hausdorff_boundary)
        )
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}\n", Self::CSV_HEADER, self.csv_row())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn disc(g: GridSpec, c: [f64; 2], r: f64) -> BinaryMask {
        BinaryMask::from_fn(g, |x| (x[0] - c[0]).hypot(x[1] - c[1]) <= r)
    }

    #[test]
    fn symmetric_difference_counts_cells() {
        let g = GridSpec::new([0.0, 0.0], 0.5, 6, 6).unwrap();
        let a = BinaryMask::empty(g);
        let mut b = BinaryMask::empty(g);
        for k in 0..5 {
            b.set(k, k, true);
        }
        assert_eq!(symmetric_difference(&a, &a).unwrap(), 0.0);
        assert_eq!(symmetric_difference(&a, &b).unwrap(), 5.0 * 0.25);
        assert_eq!(lq_char_distance(&a, &b, 1.0).unwrap(), 1.25);
    }

    #[test]
    fn unit_area_difference_under_l2() {
        let g = GridSpec::pixels(4, 4).unwrap();
        let a = BinaryMask::empty(g);
        let mut b = a.clone();
        b.set(2, 1, true);
        assert_eq!(lq_char_distance(&a, &b, 2.0).unwrap(), 1.0);
        assert!(lq_char_distance(&a, &b, 0.5).is_err());
    }

    #[test]
    fn l2_constant_offset() {
        let g = GridSpec::new([0.0, 0.0], 0.1, 10, 20).unwrap();
        let a = ScalarField::from_fn(g, |x| x[0]).unwrap();
        let b = a.map(|v| v + 0.3).unwrap();
        assert_eq!(l2_odf_distance(&a, &a, None).unwrap(), 0.0);
        let s = g.area();
        assert!((l2_odf_distance(&a, &b, None).unwrap() - 0.3 * s.sqrt()).abs() < 1e-12);
        let w = Window { row_start: 0, row_end: 5, col_start: 0, col_end: 10 };
        let sw = 50.0 * g.cell_area();
        assert!((l2_odf_distance(&a, &b, Some(w)).unwrap() - 0.3 * sw.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_concentric_circles() {
        let circle = |r: f64| {
            let pts = (0..400)
                .map(|k| {
                    let t = k as f64 * std::f64::consts::TAU / 400.0;
                    [r * t.cos(), r * t.sin()]
                })
                .collect();
            Polyline::new(pts, true).unwrap()
        };
        let d = hausdorff_boundary(&[circle(1.0)], &[circle(1.2)], 0.005).unwrap();
        assert!((d - 0.2).abs() < 1e-3, "{d}");
        assert_eq!(hausdorff_boundary(&[circle(1.0)], &[circle(1.0)], 0.01).unwrap(), 0.0);
        assert!(matches!(hausdorff_boundary(&[], &[circle(1.0)], 0.01), Err(Error::EmptyBoundary)));
    }

    #[test]
    fn report_for_identical_and_inverse() {
        let g = GridSpec::new([-2.0, -2.0], 0.05, 80, 80).unwrap();
        let a = disc(g, [0.0, 0.0], 1.0);
        let same = MetricReport::compute(&a, &a, 2.0).unwrap();
        assert_eq!(same.symmetric_difference_area, 0.0);
        assert_eq!(same.l2_odf_distance, Some(0.0));
        assert_eq!(same.hausdorff_boundary, Some(0.0));
        let inv = MetricReport::compute(&a, &a.complement(), 2.0).unwrap();
        assert_eq!(inv.misclassification_fraction, 1.0);
        let empty = MetricReport::compute(&a, &BinaryMask::empty(g), 1.0).unwrap();
        assert_eq!(empty.l2_odf_distance, None);
        assert_eq!(empty.hausdorff_boundary, None);
        assert_eq!(empty.csv_row().split(',').count(), 6);
        assert!(empty.csv_row().contains(",,"));
    }
}
