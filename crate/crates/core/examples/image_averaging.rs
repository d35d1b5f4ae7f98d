//! Denoising a text image by averaging noisy copies. Writes the truth, one
//! noisy copy, residual images and metrics for each estimator.
//!
//!     cargo run --release --example image_averaging [out_dir]

use std::path::PathBuf;

use odfset::expectations::{DaOptions, Estimator};
use odfset::experiments::{image_averaging_pipeline, noisy_realization_generator, text_mask};
use odfset::io;

fn main() -> odfset::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/example-out/image_averaging".into()));
    let truth = text_mask("SETS", 4, 6)?;
    let noisy = noisy_realization_generator(&truth, 0.15, 25, 3)?;
    let da = DaOptions { max_candidates: Some(64), ..DaOptions::default() };
    let outcome =
        image_averaging_pipeline(&truth, &noisy, &[Estimator::Odf, Estimator::Vorobev, Estimator::DistanceAverage], da)?;

    std::fs::create_dir_all(&out)?;
    io::write_mask(out.join("truth.pgm"), &truth)?;
    io::write_mask(out.join("noisy_0.pgm"), &noisy[0])?;
    outcome.write(&out)?;

    println!("single copy misclassification {:.4}", outcome.single_misclassification);
    for o in &outcome.outcomes {
        println!(
            "{:<8} misclassification {:.4}  measure {:>7.1} (truth {})",
            o.estimator.to_string(),
            o.report.misclassification_fraction,
            o.estimate.measure(),
            truth.measure()
        );
    }
    println!("images and metrics in {}", out.display());
    Ok(())
}
