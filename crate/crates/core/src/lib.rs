//! Besov regularity estimators, spectral pressure solvers and
//! time-regularity experiments for fields on the periodic torus.

// negated comparisons reject NaN parameters; index loops mirror the formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod euler;
mod fft;
pub mod grid;
pub mod interp;
pub mod norms;
pub mod par;
pub mod pfld;
pub mod pressure;
pub mod product;
pub mod report;
pub mod scan;
pub mod synth;

pub use error::{Error, Result};
pub use grid::{Field, Grid, SpectralField};
pub use pfld::{read_field, write_field};
