//! Real zeros of random polynomials with SO(2)-invariant coefficient weights.

pub mod ensembles;
pub mod cli;
pub mod empirical;
pub mod error;
pub mod kacrice;
pub mod limit;
pub mod output;
pub mod quadrature;
pub mod roots;
pub mod weights;

pub use error::{Error, Result};
