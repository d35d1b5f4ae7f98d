//! Set-valued expectations: ODF mean set, Vorob'ev and distance-average.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{extract_level, isocontour, zero_isocontour, LevelSet, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::grid::{BinaryMask, GridSpec, Polyline, ScalarField, Window};
use crate::io;
use crate::odf::{
    oriented_distance_field, sublevel_mask, superlevel_mask, uniform_weights, warn_non_lipschitz,
    weighted_mean_fields,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Odf,
    Vorobev,
    DistanceAverage,
    Empirical,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Odf => "odf",
            Self::Vorobev => "vorobev",
            Self::DistanceAverage => "da",
            Self::Empirical => "empirical",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "odf" => Ok(Self::Odf),
            "vorobev" => Ok(Self::Vorobev),
            "da" | "distance_average" | "distance-average" => Ok(Self::DistanceAverage),
            "empirical" => Ok(Self::Empirical),
            other => Err(Error::Parse(format!("unknown estimator `{other}` (odf, vorobev, da, empirical)"))),
        }
    }
}

/// An estimated set together with the field it was thresholded from.
#[derive(Debug, Clone)]
pub struct SetEstimate {
    pub mask: BinaryMask,
    pub boundary: Vec<Polyline>,
    /// Mean ODF for the ODF, empirical and DA estimators; coverage for Vorob'ev.
    pub source_field: ScalarField,
    pub estimator: Estimator,
    pub threshold_used: f64,
    /// Exponent of the DA metric.
    pub q_norm: Option<f64>,
    /// Minimized DA metric.
    pub metric_value: Option<f64>,
}

/// Manifest written next to an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateManifest {
    pub estimator: Estimator,
    pub threshold_used: f64,
    pub grid: GridSpec,
    pub measure: f64,
    pub q_norm: Option<f64>,
    pub metric_value: Option<f64>,
    pub files: Vec<String>,
}

impl SetEstimate {
    pub fn measure(&self) -> f64 {
        self.mask.measure()
    }

    pub fn manifest(&self) -> EstimateManifest {
        EstimateManifest {
            estimator: self.estimator,
            threshold_used: self.threshold_used,
            grid: *self.mask.grid(),
            measure: self.measure(),
            q_norm: self.q_norm,
            metric_value: self.metric_value,
            files: ["mask.pgm", "boundary.csv", "field.csv", "manifest.json"].map(String::from).to_vec(),
        }
    }

    /// Writes `mask.pgm`, `boundary.csv`, `field.csv` and `manifest.json`.
    pub fn write_bundle(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        io::write_mask(dir.join("mask.pgm"), &self.mask)?;
        io::write_polylines(dir.join("boundary.csv"), &self.boundary)?;
        io::write_field_csv(dir.join("field.csv"), &self.source_field)?;
        io::write_json(dir.join("manifest.json"), &self.manifest())
    }
}

/// Options for the ODF mean set.
#[derive(Debug, Clone, Copy)]
pub struct OdfOptions {
    /// Warn about inputs that are not 1-Lipschitz.
    pub check_lipschitz: bool,
    /// Plateau tolerance for the boundary.
    pub tolerance: f64,
}

impl Default for OdfOptions {
    fn default() -> Self {
        Self { check_lipschitz: true, tolerance: DEFAULT_TOLERANCE }
    }
}

/// Zero-sublevel set of the weighted mean ODF.
pub fn odf_expectation(fields: &[ScalarField], weights: &[f64]) -> Result<SetEstimate> {
    odf_expectation_with(fields, weights, OdfOptions::default())
}

pub fn odf_expectation_with(fields: &[ScalarField], weights: &[f64], opts: OdfOptions) -> Result<SetEstimate> {
    if opts.check_lipschitz {
        warn_non_lipschitz(fields);
    }
    let mean = weighted_mean_fields(fields, weights)?;
    Ok(estimate_from_mean(mean, Estimator::Odf, opts.tolerance))
}

/// Sample mean set: the ODF expectation under uniform weights.
pub fn empirical_mean_set(fields: &[ScalarField]) -> Result<SetEstimate> {
    let mut est = odf_expectation(fields, &uniform_weights(fields.len()))?;
    est.estimator = Estimator::Empirical;
    Ok(est)
}

/// Thresholds an already averaged ODF at zero.
pub fn estimate_from_mean(mean: ScalarField, estimator: Estimator, tolerance: f64) -> SetEstimate {
    SetEstimate {
        mask: sublevel_mask(&mean, 0.0),
        boundary: zero_isocontour(&mean, tolerance),
        source_field: mean,
        estimator,
        threshold_used: 0.0,
        q_norm: None,
        metric_value: None,
    }
}

/// Fraction of realizations covering each cell, with the exact counts kept.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageField {
    field: ScalarField,
    counts: Vec<u32>,
    m: usize,
}

impl CoverageField {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn grid(&self) -> &GridSpec {
        self.field.grid()
    }
}

/// Streaming coverage count.
#[derive(Debug, Clone)]
pub struct CoverageCounter {
    grid: GridSpec,
    counts: Vec<u32>,
    m: usize,
}

impl CoverageCounter {
    pub fn new(grid: GridSpec) -> Self {
        Self { grid, counts: vec![0; grid.len()], m: 0 }
    }

    pub fn add(&mut self, mask: &BinaryMask) -> Result<()> {
        self.grid.ensure_same(mask.grid())?;
        for (c, &b) in self.counts.iter_mut().zip(mask.bits()) {
            *c += b as u32;
        }
        self.m += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<CoverageField> {
        if self.m == 0 {
            return Err(Error::EmptyInput);
        }
        let m = self.m as f64;
        let values = self.counts.iter().map(|&c| c as f64 / m).collect();
        Ok(CoverageField { field: ScalarField::from_raw(self.grid, values), counts: self.counts, m: self.m })
    }
}

/// Pointwise fraction of masks containing each cell.
pub fn coverage(masks: &[BinaryMask]) -> Result<CoverageField> {
    let first = masks.first().ok_or(Error::EmptyInput)?;
    let mut counter = CoverageCounter::new(*first.grid());
    for m in masks {
        counter.add(m)?;
    }
    counter.finish()
}

/// Vorob'ev expectation of equally weighted masks.
pub fn vorobev_expectation(masks: &[BinaryMask]) -> Result<SetEstimate> {
    vorobev_from_coverage(coverage(masks)?)
}

/// Excursion set `{coverage >= q}` for the largest attained level `q = k/m`
/// whose excursion measure reaches the mean measure of the realizations.
///
/// Measures are compared as integer cell counts: `#{count >= k} * m` against
/// the total count, so no rounding enters the choice of `q`. Any larger
/// level then has a strictly smaller excursion measure.
pub fn vorobev_from_coverage(cov: CoverageField) -> Result<SetEstimate> {
    let m = cov.m as u64;
    let total: u64 = cov.counts.iter().map(|&c| c as u64).sum();
    // histogram[k] = number of cells covered exactly k times.
    let mut histogram = vec![0u64; cov.m + 1];
    for &c in &cov.counts {
        histogram[c as usize] += 1;
    }
    let mut at_least = 0u64;
    let mut chosen = None;
    for k in (1..=cov.m).rev() {
        if histogram[k] == 0 {
            continue;
        }
        at_least += histogram[k];
        if at_least * m >= total {
            chosen = Some(k);
            break;
        }
    }
    let grid = *cov.grid();
    let (mask, q, boundary) = match chosen {
        Some(k) => {
            let q = k as f64 / cov.m as f64;
            let mask = BinaryMask::new(grid, cov.counts.iter().map(|&c| c as usize >= k).collect())?;
            // Contour halfway to the next attained level down, so the line
            // separates member and non-member cells.
            let below = (0..k).rev().find(|&j| histogram[j] > 0).unwrap_or(0);
            let level = 0.5 * (q + below as f64 / cov.m as f64);
            (mask, q, isocontour(&cov.field, level, DEFAULT_TOLERANCE))
        }
        None => (BinaryMask::empty(grid), 1.0, Vec::new()),
    };
    debug_assert!(chosen.is_none() || mask == superlevel_mask(&cov.field, q - 1e-12));
    Ok(SetEstimate {
        mask,
        boundary,
        source_field: cov.field,
        estimator: Estimator::Vorobev,
        threshold_used: q,
        q_norm: None,
        metric_value: None,
    })
}

/// Options for the distance-average estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DaOptions {
    /// Exponent of the `L^q` metric.
    pub q_norm: f64,
    /// Window for the metric and the returned set; the full grid when unset.
    pub window: Option<Window>,
    /// Evenly thin the candidate thresholds to at most this many (zero is
    /// always kept). Exhaustive when unset.
    pub max_candidates: Option<usize>,
}

impl Default for DaOptions {
    fn default() -> Self {
        Self { q_norm: 2.0, window: None, max_candidates: None }
    }
}

/// Distance-average expectation with the ODF as representative function
/// and weights `1/m`.
pub fn distance_average_expectation(fields: &[ScalarField], opts: DaOptions) -> Result<SetEstimate> {
    let mean = weighted_mean_fields(fields, &uniform_weights(fields.len()))?;
    distance_average_from_mean(mean, opts)
}

/// Distance-average level set of a given mean ODF `F`.
///
/// Every candidate `s` gives `A_s = {F <= s}`; the ODF of `A_s` is recomputed
/// and compared to `F` in `L^q` over the window. The minimizer wins, the
/// smaller `s` on ties. Candidates whose level set is empty or full are
/// skipped.
pub fn distance_average_from_mean(mean: ScalarField, opts: DaOptions) -> Result<SetEstimate> {
    if !(opts.q_norm >= 1.0 && opts.q_norm.is_finite()) {
        return Err(Error::BadConfig(format!("q_norm must be a finite real >= 1, got {}", opts.q_norm)));
    }
    let grid = *mean.grid();
    let window = opts.window.unwrap_or_else(|| Window::full(&grid));
    window.validate(&grid)?;
    let idx: Vec<usize> = window.indices(&grid).collect();

    let mut candidates: Vec<f64> = idx.iter().map(|&k| mean.values()[k]).collect();
    candidates.push(0.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    if let Some(cap) = opts.max_candidates {
        candidates = thin(&candidates, cap.max(1));
    }

    let q = opts.q_norm;
    let cell = grid.cell_area();
    let scores: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|&s| {
            let set = sublevel_mask(&mean, s);
            let b = oriented_distance_field(&set).ok()?;
            let sum: f64 = idx.iter().map(|&k| (mean.values()[k] - b.values()[k]).abs().powf(q)).sum();
            Some((sum * cell).powf(1.0 / q))
        })
        .collect();

    let mut best: Option<(f64, f64)> = None;
    for (&s, score) in candidates.iter().zip(&scores) {
        if let Some(v) = *score {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((s, v));
            }
        }
    }
    let (s, value) = best.ok_or(Error::DegenerateSet)?;
    let full = sublevel_mask(&mean, s);
    let mut bits = vec![false; grid.len()];
    for &k in &idx {
        bits[k] = full.bits()[k];
    }
    let mask = BinaryMask::new(grid, bits)?;
    let boundary = isocontour(&mean, s, DEFAULT_TOLERANCE);
    Ok(SetEstimate {
        mask,
        boundary,
        source_field: mean,
        estimator: Estimator::DistanceAverage,
        threshold_used: s,
        q_norm: Some(q),
        metric_value: Some(value),
    })
}

/// At most `cap` evenly spaced entries of a sorted list, keeping zero.
fn thin(sorted: &[f64], cap: usize) -> Vec<f64> {
    if sorted.len() <= cap {
        return sorted.to_vec();
    }
    let n = sorted.len();
    let mut out: Vec<f64> = if cap == 1 {
        vec![sorted[0]]
    } else {
        (0..cap).map(|i| sorted[i * (n - 1) / (cap - 1)]).collect()
    };
    out.push(0.0);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Boundary of an estimate: the level `threshold_used` of its source field,
/// with regions within `tolerance` of the level reported as plateau loops.
pub fn expected_boundary(estimate: &SetEstimate, tolerance: f64) -> Vec<Polyline> {
    expected_boundary_set(estimate, tolerance).all_polylines()
}

/// As [`expected_boundary`], keeping the plateau mask apart.
pub fn expected_boundary_set(estimate: &SetEstimate, tolerance: f64) -> LevelSet {
    extract_level(&estimate.source_field, estimate.threshold_used, tolerance)
}
