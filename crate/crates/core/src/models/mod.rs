//! Parameter types, the characteristic exponent and its derivatives,
//! cumulants and Lévy-measure diagnostics.

mod cumulants;
mod exponent;
mod family;
mod levy;
mod params;

pub use cumulants::{cumulant, cumulants, Cumulants, K_MAX};
pub use exponent::{characteristic_exponent, psi_gradient, psi_hessian};
pub use family::{Family, ModelSpec, VgRecord};
pub use levy::{activity_classification, levy_density, scale_time, variation_integral, Activity};
pub use params::{GtsParams, BETA_CEILING, BG_SWITCH, GTS_NAMES, POSITIVE_FLOOR};

pub(crate) use family::ModelExponent;
