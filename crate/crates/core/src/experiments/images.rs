use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{default_schema, text_mask, ExperimentReport, Summary};
use crate::error::{Error, Result};
use crate::expectations::{
    distance_average_from_mean, estimate_from_mean, vorobev_expectation, DaOptions, Estimator, SetEstimate,
};
use crate::contour::DEFAULT_TOLERANCE;
use crate::grid::BinaryMask;
use crate::io;
use crate::metrics::MetricReport;
use crate::odf::{oriented_distance_field, uniform_weights, weighted_mean_fields};
use crate::shapes::stream_rng;

/// `m` copies of `truth`, each cell flipped independently with probability
/// `flip_prob`. Copy `i` uses random stream `i` under `seed`.
pub fn noisy_realization_generator(truth: &BinaryMask, flip_prob: f64, m: usize, seed: u64) -> Result<Vec<BinaryMask>> {
    if !(0.0..0.5).contains(&flip_prob) {
        return Err(Error::BadConfig(format!("flip_prob must lie in [0, 0.5), got {flip_prob}")));
    }
    (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let bits = truth.bits().iter().map(|&b| b ^ rng.random_bool(flip_prob)).collect();
            BinaryMask::new(*truth.grid(), bits)
        })
        .collect()
}

/// Three-level residual: 0 where only the estimate has the cell, 128 where
/// only the truth has it, 255 where they agree.
pub fn residual_image(estimate: &BinaryMask, truth: &BinaryMask) -> Result<Vec<u8>> {
    estimate.grid().ensure_same(truth.grid())?;
    Ok(estimate
        .bits()
        .iter()
        .zip(truth.bits())
        .map(|(&e, &t)| match (e, t) {
            (true, false) => 0,
            (false, true) => 128,
            _ => 255,
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct EstimatorOutcome {
    pub estimator: Estimator,
    pub estimate: SetEstimate,
    pub report: MetricReport,
    pub residual: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub outcomes: Vec<EstimatorOutcome>,
    /// Mean misclassification of the individual realizations.
    pub single_misclassification: f64,
}

impl PipelineOutcome {
    pub fn get(&self, estimator: Estimator) -> Option<&EstimatorOutcome> {
        self.outcomes.iter().find(|o| o.estimator == estimator)
    }

    /// Writes `residual_{name}.pgm` and `metrics_{name}.json` per estimator
    /// and a combined `metrics.csv`. Returns the file names.
    pub fn write(&self, dir: &Path) -> Result<Vec<String>> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        let mut csv = format!("estimator,{}\n", MetricReport::CSV_HEADER);
        for o in &self.outcomes {
            let residual = format!("residual_{}.pgm", o.estimator);
            io::write_gray8(dir.join(&residual), o.estimate.mask.grid(), &o.residual)?;
            let metrics = format!("metrics_{}.json", o.estimator);
            io::write_json(dir.join(&metrics), &o.report)?;
            csv.push_str(&format!("{},{}\n", o.estimator, o.report.csv_row()));
            files.push(residual);
            files.push(metrics);
        }
        std::fs::write(dir.join("metrics.csv"), csv)?;
        files.push("metrics.csv".into());
        Ok(files)
    }
}

/// Estimates `truth` from noisy `realizations` with each requested estimator
/// and scores the results against it.
pub fn image_averaging_pipeline(
    truth: &BinaryMask,
    realizations: &[BinaryMask],
    estimators: &[Estimator],
    da: DaOptions,
) -> Result<PipelineOutcome> {
    if realizations.is_empty() {
        return Err(Error::EmptyInput);
    }
    for r in realizations {
        truth.grid().ensure_same(r.grid())?;
    }
    let area = truth.grid().area();
    let single = realizations
        .iter()
        .map(|r| Ok(r.symmetric_difference(truth)?.measure() / area))
        .sum::<Result<f64>>()?
        / realizations.len() as f64;

    let needs_mean = estimators.iter().any(|e| *e != Estimator::Vorobev);
    let mean = if needs_mean {
        let fields: Vec<_> = realizations.par_iter().map(oriented_distance_field).collect::<Result<_>>()?;
        Some(weighted_mean_fields(&fields, &uniform_weights(fields.len()))?)
    } else {
        None
    };

    let mut outcomes = Vec::new();
    for &estimator in estimators {
        let estimate = match estimator {
            Estimator::Odf | Estimator::Empirical => {
                estimate_from_mean(mean.clone().expect("mean computed"), estimator, DEFAULT_TOLERANCE)
            }
            Estimator::Vorobev => vorobev_expectation(realizations)?,
            Estimator::DistanceAverage => distance_average_from_mean(mean.clone().expect("mean computed"), da)?,
        };
        let report = MetricReport::compute(&estimate.mask, truth, da.q_norm)?;
        let residual = residual_image(&estimate.mask, truth)?;
        outcomes.push(EstimatorOutcome { estimator, estimate, report, residual });
    }
    Ok(PipelineOutcome { outcomes, single_misclassification: single })
}

/// Denoising study on a synthetic text image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImageAverageConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub text: String,
    pub scale: usize,
    pub margin: usize,
    pub flip_prob: f64,
    pub m_values: Vec<usize>,
    /// Independent noise seeds per sample size.
    pub seeds: usize,
    pub seed: u64,
    pub q_norm: f64,
    pub da_max_candidates: Option<usize>,
    /// Sample size whose first-seed residuals and metrics are written out.
    pub artifact_m: usize,
}

impl Default for ImageAverageConfig {
    fn default() -> Self {
        Self {
            schema_version: default_schema(),
            text: "RANDOM SETS".into(),
            scale: 3,
            margin: 6,
            flip_prob: 0.1,
            m_values: vec![1, 5, 15, 45],
            seeds: 20,
            seed: 7,
            q_norm: 2.0,
            da_max_candidates: Some(64),
            artifact_m: 15,
        }
    }
}

const STUDY_ESTIMATORS: [Estimator; 3] = [Estimator::Odf, Estimator::Vorobev, Estimator::DistanceAverage];

/// Misclassification over seeds for each sample size. Seed `s` draws its
/// noisy copies with base seed `seed + s`, so smaller samples are prefixes
/// of larger ones.
///
/// Columns: `m`, `median`, `q25`, `q75` (ODF estimator), then the medians of
/// the Vorob'ev and distance-average estimators and of single realizations.
/// Artifacts: `truth.pgm`, `realization_0.pgm` and the pipeline files for
/// `artifact_m`.
pub fn image_average_experiment(cfg: &ImageAverageConfig, out: Option<&Path>) -> Result<ExperimentReport> {
    if cfg.seeds == 0 || cfg.m_values.is_empty() || cfg.m_values.contains(&0) {
        return Err(Error::BadConfig("seeds and every m must be positive".into()));
    }
    let truth = text_mask(&cfg.text, cfg.scale, cfg.margin)?;
    let da = DaOptions { q_norm: cfg.q_norm, window: None, max_candidates: cfg.da_max_candidates };
    let m_max = *cfg.m_values.iter().max().expect("non-empty");

    let per_seed: Vec<Vec<[f64; 4]>> = (0..cfg.seeds)
        .into_par_iter()
        .map(|s| {
            let all = noisy_realization_generator(&truth, cfg.flip_prob, m_max, cfg.seed.wrapping_add(s as u64))?;
            cfg.m_values
                .iter()
                .map(|&m| {
                    let o = image_averaging_pipeline(&truth, &all[..m], &STUDY_ESTIMATORS, da)?;
                    let mis = |e| o.get(e).expect("requested").report.misclassification_fraction;
                    Ok([
                        mis(Estimator::Odf),
                        mis(Estimator::Vorobev),
                        mis(Estimator::DistanceAverage),
                        o.single_misclassification,
                    ])
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let rows = cfg
        .m_values
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let col = |c: usize| per_seed.iter().map(|v| v[k][c]).collect::<Vec<_>>();
            let odf = Summary::of(&col(0));
            vec![
                m as f64,
                odf.median,
                odf.q25,
                odf.q75,
                Summary::of(&col(1)).median,
                Summary::of(&col(2)).median,
                Summary::of(&col(3)).median,
            ]
        })
        .collect();

    let mut artifacts = Vec::new();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        io::write_mask(dir.join("truth.pgm"), &truth)?;
        let sample = noisy_realization_generator(&truth, cfg.flip_prob, cfg.artifact_m.max(1), cfg.seed)?;
        io::write_mask(dir.join("realization_0.pgm"), &sample[0])?;
        artifacts.extend(["truth.pgm".to_string(), "realization_0.pgm".to_string()]);
        let outcome = image_averaging_pipeline(&truth, &sample, &STUDY_ESTIMATORS, da)?;
        artifacts.extend(outcome.write(dir)?);
    }

    Ok(ExperimentReport {
        name: "image-average".into(),
        config: serde_json::to_value(cfg)?,
        columns: ["m", "median", "q25", "q75", "vorobev_median", "da_median", "single_median"]
            .map(String::from)
            .to_vec(),
        rows,
        artifacts,
    })
}
