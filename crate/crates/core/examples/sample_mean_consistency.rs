//! Monte Carlo consistency of the sample-mean estimator: the spread of the
//! estimated radius (ball model) and angle (upper half-plane model) shrinks
//! as the sample grows.
//!
//!     cargo run --release --example sample_mean_consistency

use odfset::experiments::{angle_diff_experiment, radius_ratio_experiment, AngleDiffConfig, RadiusRatioConfig};
use odfset::shapes::ParameterLaw;

fn main() -> odfset::Result<()> {
    for (label, law) in [("U(0.8, 1.2)", ParameterLaw::uniform(0.8, 1.2)), ("U(0.5, 1.5)", ParameterLaw::uniform(0.5, 1.5))] {
        let report = radius_ratio_experiment(&RadiusRatioConfig { law, ..RadiusRatioConfig::default() })?;
        println!("radius ratio, radius ~ {label}");
        print!("{}", report.to_csv());
    }
    let report = angle_diff_experiment(&AngleDiffConfig::default())?;
    println!("angle difference, angle ~ U(pi/8, 3pi/8)");
    print!("{}", report.to_csv());
    Ok(())
}
