//! Fundamental domain, pointwise evaluation, Petersson quadrature and the Parseval side.

mod domain;
mod eval;
mod quadrature;
mod spectral;

pub use domain::{reduce, reduce_with_matrix, Sl2, UpperHalfPoint, REDUCED_TOL};
pub use eval::{arithmetic_norm, eval_form, series_tail, FormValue, MIN_HEIGHT, VOLUME};
pub use quadrature::{
    eigenform_mass, height_cutoff, integrate_domain, integrate_on, l4_norm, mixed_moment_geometric,
    mixed_moment_quad, petersson_norm, petersson_norm_quad, DomainMesh,
};
pub use spectral::{parseval_spectral, spectral_expansion, triple_inner, SpectralExpansion};
