use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{default_schema, replicate_stream, ExperimentReport, Summary, DEFAULT_REPS};
use crate::contour::{zero_isocontour, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::shapes::{separable_decomposition, stream_rng, ParameterLaw, RandomSetModel, ShapeFamily};

fn default_m_values() -> Vec<usize> {
    vec![10, 100, 1000]
}

fn default_seed() -> u64 {
    42
}

/// Ratio of the sample mean set's radius to the expected radius for random
/// discs centered at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadiusRatioConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub law: ParameterLaw,
    pub m_values: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
}

impl Default for RadiusRatioConfig {
    fn default() -> Self {
        Self {
            schema_version: default_schema(),
            law: ParameterLaw::uniform(0.8, 1.2),
            m_values: default_m_values(),
            reps: DEFAULT_REPS,
            seed: default_seed(),
        }
    }
}

/// Boundary angle of the sample mean set of random upper half-planes,
/// minus the center of the angle law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AngleDiffConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub law: ParameterLaw,
    pub m_values: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    /// Cells per side of the grid on `[-1, 1]^2` the mean field is contoured on.
    pub grid_n: usize,
}

impl Default for AngleDiffConfig {
    fn default() -> Self {
        use std::f64::consts::PI;
        Self {
            schema_version: default_schema(),
            law: ParameterLaw::uniform(PI / 8.0, 3.0 * PI / 8.0),
            m_values: default_m_values(),
            reps: DEFAULT_REPS,
            seed: default_seed(),
            grid_n: 32,
        }
    }
}

fn check_common(m_values: &[usize], reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(Error::BadConfig("reps must be at least 1".into()));
    }
    if m_values.is_empty() || m_values.contains(&0) {
        return Err(Error::BadConfig("m_values must be non-empty and positive".into()));
    }
    Ok(())
}

fn summary_report(name: &str, config: Value, m_values: &[usize], stats: Vec<Vec<f64>>) -> ExperimentReport {
    let rows = m_values
        .iter()
        .zip(stats)
        .map(|(&m, s)| {
            let sum = Summary::of(&s);
            vec![m as f64, sum.median, sum.q25, sum.q75]
        })
        .collect();
    ExperimentReport {
        name: name.to_string(),
        config,
        columns: ["m", "median", "q25", "q75"].map(String::from).to_vec(),
        rows,
        artifacts: Vec::new(),
    }
}

/// For discs `|x| <= Theta` the mean ODF is `|x| - mean(Theta)`, so the sample
/// mean set is the disc of radius `mean(Theta)`; the statistic is that
/// radius over `E Theta`.
pub fn radius_ratio_experiment(cfg: &RadiusRatioConfig) -> Result<ExperimentReport> {
    check_common(&cfg.m_values, cfg.reps)?;
    RandomSetModel::new(ShapeFamily::Ball { center: [0.0, 0.0] }, cfg.law.clone(), cfg.seed)?;
    let expected = cfg.law.mean()[0];
    let stats: Vec<Vec<f64>> = cfg
        .m_values
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            (0..cfg.reps)
                .into_par_iter()
                .map(|r| {
                    let mut rng = stream_rng(cfg.seed, replicate_stream(k, r));
                    let sum: f64 = (0..m).map(|_| cfg.law.sample(&mut rng)[0]).sum();
                    sum / m as f64 / expected
                })
                .collect()
        })
        .collect();
    Ok(summary_report("radius-ratio", serde_json::to_value(cfg)?, &cfg.m_values, stats))
}

/// For upper half-planes the mean ODF is `x1 mean(sin) - x2 mean(cos)`. The
/// field is rendered from that factorization, its zero contour extracted,
/// and the boundary angle read off a total-least-squares line through the
/// origin.
pub fn angle_diff_experiment(cfg: &AngleDiffConfig) -> Result<ExperimentReport> {
    check_common(&cfg.m_values, cfg.reps)?;
    if cfg.grid_n < 2 {
        return Err(Error::BadConfig("grid_n must be at least 2".into()));
    }
    RandomSetModel::new(ShapeFamily::UpperHalfPlane, cfg.law.clone(), cfg.seed)?;
    let center = cfg.law.mean()[0];
    let decomp = separable_decomposition(&ShapeFamily::UpperHalfPlane)?;
    let grid = GridSpec::from_extent([-1.0, -1.0], [1.0, 1.0], cfg.grid_n, cfg.grid_n)?;
    let stats: Result<Vec<Vec<f64>>> = cfg
        .m_values
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            (0..cfg.reps)
                .into_par_iter()
                .map(|r| {
                    let mut rng = stream_rng(cfg.seed, replicate_stream(k, r));
                    let mut g = vec![0.0; decomp.k()];
                    for _ in 0..m {
                        let theta = cfg.law.sample(&mut rng);
                        for (acc, v) in g.iter_mut().zip(decomp.g(&theta)) {
                            *acc += v / m as f64;
                        }
                    }
                    let field = ScalarField::from_fn(grid, |x| decomp.eval_with(x, &g).expect("k matches"))?;
                    Ok(boundary_angle(&field)? - center)
                })
                .collect()
        })
        .collect();
    Ok(summary_report("angle-diff", serde_json::to_value(cfg)?, &cfg.m_values, stats?))
}

/// Angle in `(-pi/2, pi/2]` of the TLS line through the origin fitted to
/// the zero contour of `field`.
pub(crate) fn boundary_angle(field: &ScalarField) -> Result<f64> {
    let lines = zero_isocontour(field, DEFAULT_TOLERANCE);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in lines.iter().flat_map(|l| &l.points) {
        sxx += p[0] * p[0];
        sxy += p[0] * p[1];
        syy += p[1] * p[1];
    }
    if sxx + syy == 0.0 {
        return Err(Error::EmptyBoundary);
    }
    let mut phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    if phi <= -std::f64::consts::FRAC_PI_2 {
        phi += std::f64::consts::PI;
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_ratio_is_one() {
        let cfg = RadiusRatioConfig {
            law: ParameterLaw::PointMass { value: vec![0.9] },
            m_values: vec![1, 7],
            reps: 5,
            ..Default::default()
        };
        let rep = radius_ratio_experiment(&cfg).unwrap();
        for row in &rep.rows {
            assert!(row[1..].iter().all(|&v| (v - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn point_mass_angle_diff_is_zero() {
        let cfg = AngleDiffConfig {
            law: ParameterLaw::PointMass { value: vec![0.7] },
            m_values: vec![3],
            reps: 4,
            ..Default::default()
        };
        let rep = angle_diff_experiment(&cfg).unwrap();
        assert!(rep.rows[0][1..].iter().all(|v| v.abs() < 1e-12), "{:?}", rep.rows);
    }

    #[test]
    fn boundary_angle_recovers_line() {
        let g = GridSpec::from_extent([-1.0, -1.0], [1.0, 1.0], 20, 20).unwrap();
        for t in [-1.2, -0.4, 0.0, 0.3, 1.0, std::f64::consts::FRAC_PI_2] {
            let f = ScalarField::from_fn(g, |x: [f64; 2]| x[0] * f64::sin(t) - x[1] * f64::cos(t)).unwrap();
            assert!((boundary_angle(&f).unwrap() - t).abs() < 1e-12, "t {t}");
        }
    }

    #[test]
    fn bad_configs() {
        let cfg = RadiusRatioConfig { reps: 0, ..Default::default() };
        assert!(radius_ratio_experiment(&cfg).is_err());
        let cfg = RadiusRatioConfig { law: ParameterLaw::Bernoulli { p: 0.5 }, ..Default::default() };
        assert!(radius_ratio_experiment(&cfg).is_err());
    }
}
