//! Certified spectral classification for the rotation composition operator
//! `f(z) -> f(r z)`, `r = e^{2 pi i x}`, on analytic functions vanishing at 0.

pub mod arith;
pub mod error;

pub use error::{Error, Result};
pub mod rotation;
pub mod contfrac;
pub mod certificates;
pub mod spectrum;
pub mod series;
