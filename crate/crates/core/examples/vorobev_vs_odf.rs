//! Compares the ODF, Vorob'ev and distance-average estimators on random
//! discs drawn from a model.
//!
//!     cargo run --release --example vorobev_vs_odf

use odfset::expectations::{distance_average_expectation, odf_expectation, vorobev_expectation, DaOptions};
use odfset::metrics::MetricReport;
use odfset::odf::uniform_weights;
use odfset::shapes::{render, sample_realizations, ParameterLaw, ParametricShape, RandomSetModel, ShapeFamily};

fn main() -> odfset::Result<()> {
    let model = RandomSetModel::new(ShapeFamily::Ball { center: [0.0, 0.0] }, ParameterLaw::uniform(0.5, 1.5), 21)?;
    let grid = model.default_grid(160)?;
    let draws = sample_realizations(&model, 60, grid)?;
    let (masks, fields): (Vec<_>, Vec<_>) = draws.into_iter().unzip();

    let odf = odf_expectation(&fields, &uniform_weights(fields.len()))?;
    let vor = vorobev_expectation(&masks)?;
    let da = distance_average_expectation(&fields, DaOptions { max_candidates: Some(128), ..DaOptions::default() })?;

    // Disc of the mean radius, for reference.
    let reference = render(&ParametricShape::Ball { center: [0.0, 0.0], radius: 1.0 }, grid).0;
    println!("estimator  threshold  measure  sym.diff  hausdorff");
    for est in [&odf, &vor, &da] {
        let r = MetricReport::compute(&est.mask, &reference, 2.0)?;
        println!(
            "{:<10} {:>9.4} {:>8.4} {:>9.4} {:>10.4}",
            est.estimator.to_string(),
            est.threshold_used,
            est.measure(),
            r.symmetric_difference_area,
            r.hausdorff_boundary.unwrap_or(f64::NAN)
        );
    }
    println!("reference  measure {:.4}", reference.measure());
    Ok(())
}
