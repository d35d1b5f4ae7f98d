//! Analytic shapes, random-set models over their parameters and separable ODFs.

mod model;
mod separable;
mod shape;

pub use model::{
    expected_odf_closed_form, render, sample_realizations, stream_rng, ParameterLaw, RandomSetModel, ShapeFamily,
};
pub use separable::{basis, coef, separable_covariance, separable_decomposition, Basis, Coef, CovMatrix, SeparableODF};
pub use shape::{odf_closed_form, polar_angle, DiscBranch, ParametricShape, SetBranch};
