//! Characteristic-function inversion by fractional FFT.

mod core;
mod grid;
mod interp;
mod inversion;

pub use self::core::{frft_core, frft_with_len, FrftPlan};
pub use grid::{newton_cotes, GridSpec};
pub use interp::{NaturalSpline, Pchip};
pub use inversion::{
    cdf_at, cdf_on_grid, pdf_at, pdf_on_grid, pdf_sensitivities_on_grid, DensityTable, Diagnostics, GridTable,
    SensitivityInterp, SensitivityTable, TailPolicy, RINGING_TOL, TRUNCATION_TOL,
};

pub(crate) use inversion::{packed_index, Engine};
