use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{default_schema, ExperimentReport};
use crate::contour::{isocontour, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::grid::{BinaryMask, GridSpec, ScalarField};
use crate::io;
use crate::odf::{oriented_distance_field, weighted_mean_fields};

/// Level sets of the expected ODF of a disc of radius `r` that sits at the
/// origin with probability `p` and at `(a, 0)` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlashingConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub p: f64,
    pub r: f64,
    pub a_values: Vec<f64>,
    pub levels: Vec<f64>,
    /// Grid spacing. Each `a` should be a whole number of cells so both discs
    /// rasterize identically.
    pub spacing: f64,
    /// Free space around the two discs.
    pub margin: f64,
}

impl Default for FlashingConfig {
    fn default() -> Self {
        Self {
            schema_version: default_schema(),
            p: 0.8,
            r: 1.0,
            a_values: vec![3.0, 2.0, 1.5],
            levels: vec![-0.5, -0.25, 0.0, 0.25, 0.5],
            spacing: 1.0 / 32.0,
            margin: 0.75,
        }
    }
}

impl FlashingConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::BadConfig(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if !(self.r > 0.0 && self.spacing > 0.0 && self.margin >= 0.0) {
            return Err(Error::BadConfig("r and spacing must be positive, margin nonnegative".into()));
        }
        if self.a_values.is_empty() || self.a_values.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::BadConfig("a_values must be finite and nonnegative".into()));
        }
        if self.levels.iter().any(|l| !l.is_finite()) {
            return Err(Error::BadConfig("levels must be finite".into()));
        }
        Ok(())
    }

    /// Grid framing both discs for shift `a`, with cell centers offset half a
    /// cell from the origin on both axes.
    pub fn grid_for(&self, a: f64) -> Result<GridSpec> {
        let h = self.spacing;
        let lo = -(self.r + self.margin);
        let cells_left = (-lo / h).ceil();
        let origin = [-cells_left * h, -cells_left * h];
        let rows = (2.0 * cells_left) as usize;
        let cols = ((a + self.r + self.margin) / h).ceil() as usize + cells_left as usize;
        GridSpec::new(origin, h, rows, cols)
    }

    /// Expected ODF for shift `a`, computed from the distance transforms of
    /// the two rasterized discs.
    pub fn expected_field(&self, a: f64) -> Result<ScalarField> {
        let g = self.grid_for(a)?;
        let r = self.r;
        let at_origin = BinaryMask::from_fn(g, |x| x[0].hypot(x[1]) <= r);
        let shifted = BinaryMask::from_fn(g, |x| (x[0] - a).hypot(x[1]) <= r);
        let fields = [oriented_distance_field(&at_origin)?, oriented_distance_field(&shifted)?];
        weighted_mean_fields(&fields, &[self.p, 1.0 - self.p])
    }

    /// `p|x| + (1 - p)|x - a| - r`.
    pub fn closed_form(&self, a: f64, x: [f64; 2]) -> f64 {
        self.p * x[0].hypot(x[1]) + (1.0 - self.p) * (x[0] - a).hypot(x[1]) - self.r
    }
}

fn tag(v: f64) -> String {
    format!("{v}")
}

/// One row per `(a, level)`: number of contour lines and vertices, and the
/// largest deviation of a vertex from the analytic level (zero when there
/// are no vertices). Artifacts: `field_a{a}.csv` and
/// `contours_a{a}_level{level}.csv`.
pub fn flashing_disc_contours(cfg: &FlashingConfig, out: Option<&Path>) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut artifacts = Vec::new();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    for &a in &cfg.a_values {
        let field = cfg.expected_field(a)?;
        if let Some(dir) = out {
            let name = format!("field_a{}.csv", tag(a));
            io::write_field_csv(dir.join(&name), &field)?;
            artifacts.push(name);
        }
        for &level in &cfg.levels {
            let lines = isocontour(&field, level, DEFAULT_TOLERANCE);
            let vertices: usize = lines.iter().map(|l| l.len()).sum();
            let residual = lines
                .iter()
                .flat_map(|l| &l.points)
                .map(|&x| (cfg.closed_form(a, x) - level).abs())
                .fold(0.0, f64::max);
            rows.push(vec![a, level, lines.len() as f64, vertices as f64, residual]);
            if let Some(dir) = out {
                let name = format!("contours_a{}_level{}.csv", tag(a), tag(level));
                io::write_polylines(dir.join(&name), &lines)?;
                artifacts.push(name);
            }
        }
    }
    Ok(ExperimentReport {
        name: "flashing-discs".into(),
        config: serde_json::to_value(cfg)?,
        columns: ["a", "level", "contours", "vertices", "max_residual"].map(String::from).to_vec(),
        rows,
        artifacts,
    })
}
