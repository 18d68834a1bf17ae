use std::f64::consts::PI;

use num_complex::Complex64;

use super::bernoulli::scaled_even_bernoulli;
use super::gamma::log_gamma;
use crate::error::{Error, Result};

const EM_TERMS: usize = 30;

/// Riemann zeta by Euler-Maclaurin; the functional equation handles Re s < 0.
pub fn zeta_line(s: Complex64) -> Result<Complex64> {
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::invalid(format!("zeta argument {s} is not finite")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("zeta has a pole at s = 1".into()));
    }
    if s.im.abs() > 1.0e5 {
        return Err(Error::Range(format!(
            "zeta argument {s} has |Im s| too large"
        )));
    }
    if s.re < 0.0 {
        let one = Complex64::new(1.0, 0.0);
        return Ok(log_chi(s)?.exp() * euler_maclaurin(one - s));
    }
    Ok(euler_maclaurin(s))
}

fn euler_maclaurin(s: Complex64) -> Complex64 {
    let n_cut = (s.norm() / PI).ceil() as usize + 20;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..n_cut {
        acc += (-s * (n as f64).ln()).exp();
    }
    let nf = n_cut as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp();
    acc += n_pow * nf / (s - 1.0) + 0.5 * n_pow;
    let b = scaled_even_bernoulli();
    // s (s+1) ... (s+2j-2) N^{-s-2j+1}
    let mut rising = s;
    let mut term = n_pow / nf;
    for (j, bj) in b.iter().enumerate().take(EM_TERMS + 1).skip(1) {
        acc += rising * term * *bj;
        let jj = j as f64;
        rising *= (s + (2.0 * jj - 1.0)) * (s + 2.0 * jj);
        term /= nf * nf;
    }
    acc
}

/// log of chi(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s), so that zeta(s) = chi(s) zeta(1-s).
pub fn log_chi(s: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let lg = log_gamma(one - s)?;
    Ok(s * 2f64.ln() + (s - 1.0) * PI.ln() + log_sin(s * (PI / 2.0)) + lg)
}

pub fn chi(s: Complex64) -> Result<Complex64> {
    Ok(log_chi(s)?.exp())
}

/// log sin z without overflow for large |Im z|.
fn log_sin(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if z.im.abs() < 20.0 {
        return z.sin().ln();
    }
    if z.im > 0.0 {
        // sin z = e^{-iz} (1 - e^{2iz}) / (2i)
        -i * z + (Complex64::new(1.0, 0.0) - (2.0 * i * z).exp()).ln() - (2.0 * i).ln()
    } else {
        // sin z = -e^{iz} (1 - e^{-2iz}) / (2i)
        i * z + (Complex64::new(1.0, 0.0) - (-2.0 * i * z).exp()).ln() - (-2.0 * i).ln()
    }
}
