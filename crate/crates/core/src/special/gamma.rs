use num_complex::Complex64;

use super::bernoulli::even_bernoulli_f64;
use crate::error::{Error, Result};

const STIRLING_RADIUS: f64 = 10.0;
const STIRLING_TERMS: usize = 15;

/// Principal branch of log Gamma(z), continuous off the negative real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::invalid(format!(
            "log_gamma argument {z} is not finite"
        )));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(format!("Gamma has a pole at {}", z.re)));
    }
    if z.norm() > 1.0e7 {
        return Err(Error::Range(format!("log_gamma argument {z} too large")));
    }
    let mut shift = 0usize;
    if z.re < 0.5 {
        shift = (0.5 - z.re).ceil() as usize;
    }
    while (z + shift as f64).norm() < STIRLING_RADIUS {
        shift += 1;
    }
    let w = z + shift as f64;
    let mut acc = stirling(w);
    for j in 0..shift {
        acc -= (z + j as f64).ln();
    }
    Ok(acc)
}

fn stirling(w: Complex64) -> Complex64 {
    let b = even_bernoulli_f64();
    let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    let mut acc = (w - 0.5) * w.ln() - w + half_ln_2pi;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut p = inv;
    for j in 1..=STIRLING_TERMS {
        let jj = j as f64;
        acc += p * (b[j] / (2.0 * jj * (2.0 * jj - 1.0)));
        p *= inv2;
    }
    acc
}

/// log Gamma on the positive real axis.
pub fn ln_gamma_real(x: f64) -> f64 {
    log_gamma(Complex64::new(x, 0.0))
        .expect("positive argument")
        .re
}
