//! Separable ODFs `h(x)^T g(theta)`: the expected ODF needs only `E g`, and
//! the covariance of ODF values needs only `Cov g`.
//!
//!     cargo run --example separable_models

use odfset::shapes::{
    basis, coef, expected_odf_closed_form, separable_covariance, separable_decomposition, CovMatrix, ParameterLaw,
    RandomSetModel, SeparableODF, ShapeFamily,
};

fn main() -> odfset::Result<()> {
    let model = RandomSetModel::new(ShapeFamily::UpperHalfPlane, ParameterLaw::uniform(0.2, 1.2), 5)?;
    let d = separable_decomposition(&model.family)?;
    println!("upper half-plane basis: {:?}", d.names());

    let gs: Vec<Vec<f64>> = model.sample_parameters(5000).iter().map(|t| d.g(t)).collect();
    let eg: Vec<f64> = (0..d.k()).map(|c| gs.iter().map(|g| g[c]).sum::<f64>() / gs.len() as f64).collect();
    for x in [[1.0, 0.2], [-0.5, 1.0], [0.3, -2.0]] {
        println!(
            "x = {x:?}: separable mean {:+.4}, closed form {:+.4}",
            d.eval_with(x, &eg)?,
            expected_odf_closed_form(&model, x)?
        );
    }
    let cov = CovMatrix::sample(&gs)?;
    println!("Cov(b(x), b(y)) at x = (1, 0), y = (0, 1): {:.5}", separable_covariance(&d, &cov, [1.0, 0.0], [0.0, 1.0])?);

    // A user-defined factorization is checked against its reference ODF.
    let shrinking = SeparableODF::new(
        vec![basis("|x|", |x| x[0].hypot(x[1])), basis("1", |_| 1.0)],
        vec![coef(|_| 1.0), coef(|t| t[0] * t[0] - 1.2)],
        &[(-0.6, 0.6)],
        |x, t| x[0].hypot(x[1]) - (1.2 - t[0] * t[0]),
    )?;
    println!("disc of radius 1.2 - theta^2: E g = (1, {:.3}); the estimate has radius {:.3}", 0.12 - 1.2, 1.2 - 0.12);
    println!("value at the origin {:.3}", shrinking.eval_with([0.0, 0.0], &[1.0, 0.12 - 1.2])?);
    Ok(())
}
