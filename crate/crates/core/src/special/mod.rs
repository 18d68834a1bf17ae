//! Special functions: log Gamma, J-Bessel, zeta, quadrature rules and the smooth window.

pub mod bernoulli;
mod bessel;
mod gamma;
pub mod quad;
mod window;
mod zeta;

pub use bessel::{bessel_j, MAX_ARGUMENT, MAX_ORDER};
pub use gamma::{ln_gamma_real, log_gamma};
pub use window::{w_breve, w_hat, Window};
pub use zeta::{chi, log_chi, zeta_line};
