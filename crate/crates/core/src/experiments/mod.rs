//! Reproducible simulation studies that write CSV, PGM and JSON artifacts.
//!
//! Every experiment writes `config.json` (the full configuration, defaults
//! filled in) and `report.csv` into its output directory, plus the
//! artifacts listed in its report. Replicate `r` at sample-size index `k`
//! draws from random stream `(k << 32) | r`, so results do not depend on
//! thread count or scheduling.

mod flashing;
mod font;
mod images;
mod monte_carlo;

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use flashing::{flashing_disc_contours, FlashingConfig};
pub use font::text_mask;
pub use images::{
    image_averaging_pipeline, image_average_experiment, noisy_realization_generator, residual_image, EstimatorOutcome,
    ImageAverageConfig, PipelineOutcome,
};
pub use monte_carlo::{angle_diff_experiment, radius_ratio_experiment, AngleDiffConfig, RadiusRatioConfig};

/// Names accepted by [`run_experiment`].
pub const EXPERIMENTS: [&str; 4] = ["radius-ratio", "angle-diff", "flashing-discs", "image-average"];

/// Default number of replicates per sample size.
pub const DEFAULT_REPS: usize = 200;

/// Current config schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Tabular result of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Files written besides `config.json` and `report.csv`, relative to the
    /// output directory.
    pub artifacts: Vec<String>,
}

impl ExperimentReport {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Writes `config.json` and `report.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        crate::io::write_json(dir.join("config.json"), &self.config)?;
        std::fs::write(dir.join("report.csv"), self.to_csv())?;
        Ok(())
    }
}

/// Median and quartiles (linear interpolation between order statistics).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Self { median: quantile(&v, 0.5), q25: quantile(&v, 0.25), q75: quantile(&v, 0.75) }
    }

    pub fn iqr(&self) -> f64 {
        self.q75 - self.q25
    }
}

/// Quantile of sorted data, interpolating at position `(n - 1) p`.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub(crate) fn replicate_stream(m_index: usize, rep: usize) -> u64 {
    ((m_index as u64) << 32) | rep as u64
}

pub(crate) fn parse_config<T: serde::de::DeserializeOwned + Default>(config: Option<&Value>) -> Result<T> {
    match config {
        None => Ok(T::default()),
        Some(v) => {
            if let Some(version) = v.get("schema_version") {
                if version.as_u64() != Some(SCHEMA_VERSION as u64) {
                    return Err(Error::BadConfig(format!(
                        "unsupported schema_version {version}, expected {SCHEMA_VERSION}"
                    )));
                }
            }
            serde_json::from_value(v.clone()).map_err(|e| Error::BadConfig(e.to_string()))
        }
    }
}

pub(crate) fn default_schema() -> u32 {
    SCHEMA_VERSION
}

/// Runs a named experiment and writes its directory.
pub fn run_experiment(name: &str, config: Option<&Value>, out: &Path) -> Result<ExperimentReport> {
    let report = match name {
        "radius-ratio" => radius_ratio_experiment(&parse_config(config)?)?,
        "angle-diff" => angle_diff_experiment(&parse_config(config)?)?,
        "flashing-discs" => flashing_disc_contours(&parse_config(config)?, Some(out))?,
        "image-average" => image_average_experiment(&parse_config(config)?, Some(out))?,
        other => {
            return Err(Error::UnknownExperiment { name: other.to_string(), valid: EXPERIMENTS.join(", ") });
        }
    };
    report.write(out)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.25), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
        let s = Summary::of(&[4.0, 1.0, 3.0, 2.0]);
        assert!(s.q25 <= s.median && s.median <= s.q75);
    }

    #[test]
    fn unknown_experiment_lists_names() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_experiment("bogus", None, dir.path()).unwrap_err();
        let msg = err.to_string();
        for n in EXPERIMENTS {
            assert!(msg.contains(n));
        }
    }

    #[test]
    fn bad_schema_version() {
        let v = serde_json::json!({"schema_version": 7});
        assert!(matches!(parse_config::<RadiusRatioConfig>(Some(&v)), Err(Error::BadConfig(_))));
        let v = serde_json::json!({"reps": "many"});
        assert!(matches!(parse_config::<RadiusRatioConfig>(Some(&v)), Err(Error::BadConfig(_))));
    }
}
