//! Generalized Tempered Stable distributions: characteristic-function
//! inversion, maximum likelihood, moment diagnostics and goodness-of-fit.

pub mod data;
pub mod error;
pub mod frft;
pub mod gof;
pub mod likelihood;
pub mod models;
pub mod moments;
pub mod quad;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};
