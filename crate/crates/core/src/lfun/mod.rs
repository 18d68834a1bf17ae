//! Approximate functional equations: Mellin kernels and central values.

mod afe;
mod kernel;
mod kernels;
mod values;

pub use afe::{AFEDescriptor, AfeOptions, LValue};
pub use kernel::{ContourKernel, Smoothing};
pub use kernels::{
    kernel_v3, kernel_v3_eps, kernel_v3_minus, kernel_v6, kernel_v6_eps, kernel_v6_stirling,
};
pub use values::{
    l_half_maass, l_half_maass_with, l_half_rs, l_half_rs_with, l_half_sym2, l_half_sym2_with,
    l_one_sym2, l_one_sym2_maass, l_one_sym2_value, log_gamma_maass, log_gamma_rs, log_gamma_sym2,
    log_gamma_sym2_maass, maass_descriptor, rs_descriptor, square_coeffs, sym2_descriptor,
    sym2_maass_descriptor,
};
