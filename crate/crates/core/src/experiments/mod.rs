//! Desk-scale scans of the moment, variance and bound quantities.

mod bounds;
mod line;
mod maass;
mod mixed;
mod moments;
mod record;

pub use bounds::{eisenstein_weight, sc_se_eval, se_integrand};
pub use maass::{MaassFormData, Parity};
pub use mixed::{
    expectation_stat, extract_triple_lvalue, first_moment_identity, nonvanishing_scan,
    triple_lvalues, variance_stat, weight_range, NONZERO,
};
pub use moments::{
    alpha_grid, exp_sum, exp_sum_ratio, mixed_moment_sum, moment1_scan, moment2_scan,
    spectral_reach, spectral_weight, sym2_t_moment, sym2_t_moment_fixed,
};
pub use record::{records_table, terms_table, ExperimentRecord, Term};
