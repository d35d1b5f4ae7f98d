//! Expectations of random closed sets through oriented distance functions.
//!
//! Sets live on a regular grid of cell centers ([`grid`]). Their oriented
//! distance fields come from an exact distance transform ([`edt`], [`odf`]),
//! and level sets are traced by marching squares ([`contour`]). On top of
//! that sit the ODF mean set, the Vorob'ev and the distance-average
//! expectations ([`expectations`]), analytic random-set models
//! ([`shapes`]), losses ([`metrics`]) and scripted studies
//! ([`experiments`]).

pub mod cli;
pub mod contour;
pub mod edt;
pub mod error;
pub mod expectations;
pub mod experiments;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod odf;
pub mod shapes;

pub use error::{Error, Result};
pub use expectations::{Estimator, SetEstimate};
pub use grid::{BinaryMask, GridSpec, Polyline, ScalarField, Window};
