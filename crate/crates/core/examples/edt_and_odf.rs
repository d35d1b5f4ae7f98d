//! Exact distance transform and oriented distance field of a small mask,
//! with its zero contour.
//!
//!     cargo run --example edt_and_odf

use odfset::contour::{zero_isocontour, DEFAULT_TOLERANCE};
use odfset::edt::distance_transform;
use odfset::odf::oriented_distance_field;
use odfset::{BinaryMask, GridSpec};

fn print_field(name: &str, values: &[f64], cols: usize) {
    println!("{name}:");
    for row in values.chunks(cols).rev() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:6.2}")).collect();
        println!("  {}", line.join(" "));
    }
}

fn main() -> odfset::Result<()> {
    // An L-shaped set on a 9x9 grid of unit cells.
    let g = GridSpec::pixels(9, 9)?;
    let mask = BinaryMask::from_fn(g, |x| {
        let (foot, post) = ((2.0..7.0).contains(&x[0]), (2.0..4.0).contains(&x[0]));
        foot && (2.0..4.0).contains(&x[1]) || post && (2.0..7.0).contains(&x[1])
    });
    println!("{} cells in the set, measure {}", mask.count(), mask.measure());

    let d = distance_transform(&mask)?;
    print_field("distance to the set", d.values(), g.cols);
    let b = oriented_distance_field(&mask)?;
    print_field("oriented distance (negative inside)", b.values(), g.cols);

    for line in zero_isocontour(&b, DEFAULT_TOLERANCE) {
        println!("zero contour: {} vertices, closed = {}, length {:.3}", line.len(), line.closed, line.length());
    }
    Ok(())
}
