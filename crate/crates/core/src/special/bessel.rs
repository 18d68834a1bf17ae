use std::f64::consts::PI;

use super::gamma::ln_gamma_real;
use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 100_000;
pub const MAX_ARGUMENT: f64 = 1.0e6;

/// Integer-order Bessel function J_n(x) for x >= 0.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(format!(
            "bessel_j argument {x} must be finite and nonnegative"
        )));
    }
    if order > MAX_ORDER || x > MAX_ARGUMENT {
        return Err(Error::Range(format!(
            "J_{order}({x}) outside supported range"
        )));
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if x < 0.5 * order as f64 || x <= 2.0 {
        Ok(series(order, x))
    } else {
        Ok(trapezoid(order, x))
    }
}

/// Power series; accurate in the relative sense while x stays below order/2.
pub(crate) fn series(order: u32, x: f64) -> f64 {
    let n = order as f64;
    let h = 0.5 * x;
    let log_t0 = n * h.ln() - ln_gamma_real(n + 1.0);
    if log_t0 < -745.0 {
        return 0.0;
    }
    let h2 = h * h;
    let mut t = log_t0.exp();
    let mut sum = t;
    let mut m = 0.0;
    loop {
        m += 1.0;
        t *= -h2 / (m * (m + n));
        sum += t;
        if t.abs() <= 1e-18 * sum.abs() && m > h {
            break;
        }
        if m > 10_000.0 {
            break;
        }
    }
    sum
}

/// Trapezoid rule on Bessel's integral; exponentially convergent, the aliasing
/// error is J_{P-n}(x) with P the number of nodes on the full period.
pub(crate) fn trapezoid(order: u32, x: f64) -> f64 {
    let n = order as f64;
    let nodes = ((n + x + 12.0 * x.cbrt() + 40.0) / 2.0).ceil() as usize;
    let h = PI / nodes as f64;
    let end = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut sum = 0.5 * (1.0 + end);
    for j in 1..nodes {
        let tau = j as f64 * h;
        sum += (n * tau - x * tau.sin()).cos();
    }
    sum / nodes as f64
}
