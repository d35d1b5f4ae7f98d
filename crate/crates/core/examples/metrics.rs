//! Loss functions between two sets: symmetric difference, L^q distance of
//! indicators, L2 distance of ODFs and Hausdorff distance of boundaries.
//!
//!     cargo run --example metrics

use odfset::metrics::MetricReport;
use odfset::{BinaryMask, GridSpec};

fn main() -> odfset::Result<()> {
    let g = GridSpec::from_extent([-2.0, -2.0], [2.0, 2.0], 128, 128)?;
    let a = BinaryMask::from_fn(g, |x| x[0].hypot(x[1]) <= 1.0);
    for shift in [0.0, 0.1, 0.5] {
        let b = BinaryMask::from_fn(g, |x| (x[0] - shift).hypot(x[1]) <= 1.0);
        let r = MetricReport::compute(&a, &b, 2.0)?;
        println!("shift {shift}: {}", serde_json::to_string(&r)?);
    }
    println!("{}", MetricReport::CSV_HEADER);
    Ok(())
}
