//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use log::info;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expectations::{
    distance_average_from_mean, distance_average_expectation, estimate_from_mean, odf_expectation_with,
    vorobev_expectation, vorobev_from_coverage, CoverageCounter, DaOptions, Estimator, OdfOptions, SetEstimate,
};
use crate::experiments::run_experiment;
use crate::grid::BinaryMask;
use crate::io;
use crate::metrics::MetricReport;
use crate::odf::{oriented_distance_field, uniform_weights, MeanAccumulator};
use crate::shapes::{render, RandomSetModel};

/// Cells per side of the grid models are rendered on.
pub const DEFAULT_GRID_SIZE: usize = 512;
/// Default cap on distance-average candidate thresholds.
pub const DEFAULT_DA_CANDIDATES: usize = 256;
/// Realizations rendered per parallel batch when streaming a model.
const BATCH: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "odfset", version, about = "Expected sets of random closed sets via oriented distance functions")]
pub struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Oriented distance field of a binary PGM image.
    Odf {
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Treat dark pixels as the foreground.
        #[arg(long)]
        invert: bool,
    },
    /// Expected set from PGM realizations or from one model JSON file.
    Expect {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "odf")]
        estimator: Estimator,
        /// Exponent of the distance-average metric.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Plateau tolerance for boundary extraction.
        #[arg(long, default_value_t = crate::contour::DEFAULT_TOLERANCE)]
        tol: f64,
        /// Realizations drawn from a model.
        #[arg(long, default_value_t = 100)]
        m: usize,
        /// Overrides the model's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid_size: usize,
        /// Cap on distance-average candidate thresholds (0 scans all).
        #[arg(long, default_value_t = DEFAULT_DA_CANDIDATES)]
        da_candidates: usize,
        #[arg(long)]
        invert: bool,
    },
    /// Losses between two binary PGM images.
    Metrics {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        invert: bool,
    },
    /// Runs a named experiment.
    Experiment {
        /// radius-ratio, angle-diff, flashing-discs or image-average.
        name: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's replicate count.
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Draws realizations of a model and writes them as PGM images.
    Simulate {
        model: PathBuf,
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid_size: usize,
    },
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli, &mut std::io::stdout()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run(cli: Cli, out: &mut (dyn Write + Send)) -> Result<()> {
    match cli.threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::BadConfig(e.to_string()))?;
            pool.install(|| dispatch(cli.command, out))
        }
        _ => dispatch(cli.command, out),
    }
}

fn dispatch(command: Command, out: &mut (dyn Write + Send)) -> Result<()> {
    match command {
        Command::Odf { image, out: dir, invert } => cmd_odf(&image, &dir, invert, out),
        Command::Expect { inputs, out: dir, estimator, q, tol, m, seed, grid_size, da_candidates, invert } => {
            let da = DaOptions { q_norm: q, window: None, max_candidates: (da_candidates > 0).then_some(da_candidates) };
            let opts = ExpectOptions { estimator, da, tol, m, seed, grid_size, invert };
            cmd_expect(&inputs, &dir, &opts, out)
        }
        Command::Metrics { a, b, q, out: dir, invert } => cmd_metrics(&a, &b, q, dir.as_deref(), invert, out),
        Command::Experiment { name, config, out: dir, seed, reps } => {
            cmd_experiment(&name, config.as_deref(), &dir, seed, reps, out)
        }
        Command::Simulate { model, m, out: dir, seed, grid_size } => cmd_simulate(&model, m, &dir, seed, grid_size, out),
    }
}

fn load_mask(path: &Path, invert: bool) -> Result<BinaryMask> {
    let mask = io::read_mask(path).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    Ok(if invert { mask.complement() } else { mask })
}

/// Writes `odf.csv`, `odf.pgm` and `odf.json` (the quantization sidecar).
pub fn cmd_odf(image: &Path, dir: &Path, invert: bool, out: &mut dyn Write) -> Result<()> {
    let mask = load_mask(image, invert)?;
    let field = oriented_distance_field(&mask)?;
    std::fs::create_dir_all(dir)?;
    io::write_field_csv(dir.join("odf.csv"), &field)?;
    io::write_quantized_field(dir, "odf", &field)?;
    writeln!(out, "min {} max {}", field.min(), field.max())?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ExpectOptions {
    pub estimator: Estimator,
    pub da: DaOptions,
    pub tol: f64,
    pub m: usize,
    pub seed: Option<u64>,
    pub grid_size: usize,
    pub invert: bool,
}

fn is_json(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Writes the estimate bundle and prints the threshold and measure.
pub fn cmd_expect(inputs: &[PathBuf], dir: &Path, opts: &ExpectOptions, out: &mut dyn Write) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let models = inputs.iter().filter(|p| is_json(p)).count();
    let estimate = match (models, inputs.len()) {
        (0, _) => expect_from_images(inputs, opts)?,
        (1, 1) => {
            let mut model = RandomSetModel::from_json(&std::fs::read_to_string(&inputs[0])?)?;
            if let Some(s) = opts.seed {
                model.seed = s;
            }
            expect_from_model(&model, opts)?
        }
        _ => return Err(Error::MixedInputs),
    };
    estimate.write_bundle(dir)?;
    writeln!(out, "estimator {}", estimate.estimator)?;
    writeln!(out, "threshold_used {}", estimate.threshold_used)?;
    writeln!(out, "measure {}", estimate.measure())?;
    if let Some(v) = estimate.metric_value {
        writeln!(out, "metric_value {v}")?;
    }
    Ok(())
}

fn expect_from_images(inputs: &[PathBuf], opts: &ExpectOptions) -> Result<SetEstimate> {
    let masks: Vec<BinaryMask> = inputs.iter().map(|p| load_mask(p, opts.invert)).collect::<Result<_>>()?;
    let grid = *masks[0].grid();
    for m in &masks[1..] {
        grid.ensure_same(m.grid())?;
    }
    info!("{} realizations on a {}x{} grid", masks.len(), grid.rows, grid.cols);
    if opts.estimator == Estimator::Vorobev {
        return vorobev_expectation(&masks);
    }
    let fields: Vec<_> = masks.par_iter().map(oriented_distance_field).collect::<Result<_>>()?;
    match opts.estimator {
        Estimator::DistanceAverage => distance_average_expectation(&fields, opts.da),
        e => {
            let odf_opts = OdfOptions { check_lipschitz: false, tolerance: opts.tol };
            let mut est = odf_expectation_with(&fields, &uniform_weights(fields.len()), odf_opts)?;
            est.estimator = e;
            Ok(est)
        }
    }
}

/// Draws `m` realizations in index order, rendering batches in parallel and
/// folding them into a running mean or coverage count, so memory stays at a
/// few fields regardless of `m`.
fn expect_from_model(model: &RandomSetModel, opts: &ExpectOptions) -> Result<SetEstimate> {
    if opts.m == 0 {
        return Err(Error::EmptyInput);
    }
    let grid = model.default_grid(opts.grid_size)?;
    info!("drawing {} realizations on a {}x{} grid", opts.m, grid.rows, grid.cols);
    let mut mean = MeanAccumulator::new(grid);
    let mut cover = CoverageCounter::new(grid);
    let w = 1.0 / opts.m as f64;
    for start in (0..opts.m).step_by(BATCH) {
        let end = (start + BATCH).min(opts.m);
        let batch: Vec<_> = (start..end)
            .into_par_iter()
            .map(|i| Ok(render(&model.realization(i as u64)?, grid)))
            .collect::<Result<_>>()?;
        for (mask, field) in &batch {
            if opts.estimator == Estimator::Vorobev {
                cover.add(mask)?;
            } else {
                mean.add(field, w)?;
            }
        }
    }
    match opts.estimator {
        Estimator::Vorobev => vorobev_from_coverage(cover.finish()?),
        Estimator::DistanceAverage => distance_average_from_mean(mean.sum_field(), opts.da),
        e => Ok(estimate_from_mean(mean.sum_field(), e, opts.tol)),
    }
}

/// Prints the report as JSON; with `dir`, also writes `metrics.json` and
/// `metrics.csv`.
pub fn cmd_metrics(a: &Path, b: &Path, q: f64, dir: Option<&Path>, invert: bool, out: &mut dyn Write) -> Result<()> {
    let (ma, mb) = (load_mask(a, invert)?, load_mask(b, invert)?);
    let report = MetricReport::compute(&ma, &mb, q)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        io::write_json(dir.join("metrics.json"), &report)?;
        std::fs::write(dir.join("metrics.csv"), report.to_csv())?;
    }
    Ok(())
}

pub fn cmd_experiment(
    name: &str,
    config: Option<&Path>,
    dir: &Path,
    seed: Option<u64>,
    reps: Option<usize>,
    out: &mut dyn Write,
) -> Result<()> {
    let mut value = match config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)
            .map_err(|e| Error::BadConfig(format!("{}: {e}", p.display())))?,
        None => serde_json::Value::Object(Default::default()),
    };
    let obj = value.as_object_mut().ok_or_else(|| Error::BadConfig("config must be a JSON object".into()))?;
    if let Some(s) = seed {
        obj.insert("seed".into(), s.into());
    }
    if let Some(r) = reps {
        obj.insert("reps".into(), r.into());
    }
    let report = run_experiment(name, Some(&value), dir)?;
    write!(out, "{}", report.to_csv())?;
    Ok(())
}

/// Writes `realization_0000.pgm`, ... and `grid.json`.
pub fn cmd_simulate(
    model: &Path,
    m: usize,
    dir: &Path,
    seed: Option<u64>,
    grid_size: usize,
    out: &mut dyn Write,
) -> Result<()> {
    let mut model = RandomSetModel::from_json(&std::fs::read_to_string(model)?)?;
    model.seed = seed.unwrap_or(model.seed);
    let grid = model.default_grid(grid_size)?;
    std::fs::create_dir_all(dir)?;
    io::write_json(dir.join("grid.json"), &grid)?;
    for start in (0..m).step_by(BATCH) {
        let end = (start + BATCH).min(m);
        let batch: Vec<_> = (start..end)
            .into_par_iter()
            .map(|i| Ok(render(&model.realization(i as u64)?, grid).0))
            .collect::<Result<_>>()?;
        for (k, mask) in batch.iter().enumerate() {
            io::write_mask(dir.join(format!("realization_{:04}.pgm", start + k)), mask)?;
        }
    }
    writeln!(out, "wrote {m} realizations")?;
    Ok(())
}
