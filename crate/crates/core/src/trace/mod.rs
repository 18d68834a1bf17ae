//! Exact-identity checkers: the Petersson formula and the J-Bessel average.

mod bessel_average;
mod petersson;

pub use bessel_average::{bessel_average, bessel_average_terms, BesselAverage};
pub use petersson::{
    default_c_max, petersson_grid, petersson_lhs, petersson_report, petersson_rhs, tail_bound,
    PeterssonReport, TAIL_TARGET,
};
