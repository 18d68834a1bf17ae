//! Kloosterman sums, GL(3) coefficients and Dirichlet coefficient streams.

mod kloosterman;
pub mod numtheory;
mod streams;

pub use kloosterman::kloosterman;
pub use streams::{gl3_coeff, rs_coeffs, satake, sym2_coeffs, triple_coeffs, CoefficientStream};
