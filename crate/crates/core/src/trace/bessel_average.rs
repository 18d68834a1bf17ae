use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{bessel_j, Window};

/// Both sides of the J-Bessel average with the error scale x/K^4 * integral v^4 |W_hat|.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselAverage {
    pub lhs: f64,
    /// Imaginary part left over from the i^k factors.
    pub lhs_imag: f64,
    pub main_term: f64,
    pub error_budget: f64,
    /// Number of even k with (k-1)/K inside the window support.
    pub terms: usize,
}

impl BesselAverage {
    /// |lhs - main_term| / error_budget.
    pub fn ratio(&self) -> f64 {
        (self.lhs - self.main_term).abs() / self.error_budget
    }
}

/// sum over even k in [k_lo, k_hi] of 2 i^k W((k-1)/K) J_{k-1}(x), as a complex number.
pub fn bessel_average_terms(
    big_k: f64,
    x: f64,
    w: &Window,
    k_lo: u32,
    k_hi: u32,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut k = k_lo + k_lo % 2;
    while k <= k_hi {
        let weight = w.evaluate((k as f64 - 1.0) / big_k);
        if weight != 0.0 {
            let ik = match k % 4 {
                0 => Complex64::new(1.0, 0.0),
                _ => Complex64::new(-1.0, 0.0),
            };
            acc += 2.0 * ik * weight * bessel_j(k - 1, x)?;
        }
        k += 2;
    }
    Ok(acc)
}

pub fn bessel_average(big_k: f64, x: f64, w: &Window) -> Result<BesselAverage> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("x = {x} must be positive")));
    }
    if !(big_k >= 20.0) || !big_k.is_finite() {
        return Err(Error::invalid(format!("K = {big_k} must be at least 20")));
    }
    let (lo, hi) = w.support();
    let k_lo = (lo * big_k + 1.0).floor().max(2.0) as u32;
    let k_hi = (hi * big_k + 1.0).ceil() as u32;
    let terms = (k_lo..=k_hi)
        .filter(|k| k % 2 == 0 && w.evaluate((*k as f64 - 1.0) / big_k) != 0.0)
        .count();
    let lhs = bessel_average_terms(big_k, x, w, k_lo, k_hi)?;

    let phase = Complex64::from_polar(1.0, x - PI / 4.0);
    let main_term = -big_k / x.sqrt() * (phase * w.w_breve(big_k * big_k / (2.0 * x))?.value).im;
    let (moment, _) = w.hat_fourth_moment()?;
    Ok(BesselAverage {
        lhs: lhs.re,
        lhs_imag: lhs.im,
        main_term,
        error_budget: x / big_k.powi(4) * moment,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_argument_is_negligible() {
        let w = Window::default();
        for big_k in [50.0, 100.0] {
            let r = bessel_average(big_k, big_k / 10.0, &w).unwrap();
            assert!(r.lhs.abs() < 1e-6 && r.main_term.abs() < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn lhs_is_real() {
        let w = Window::default();
        let r = bessel_average(50.0, 700.0, &w).unwrap();
        assert!(r.lhs_imag.abs() < 1e-12);
        assert!(r.terms > 0);
    }

    #[test]
    fn sum_stops_at_support() {
        let w = Window::default();
        let (big_k, x) = (60.0, 900.0);
        let r = bessel_average(big_k, x, &w).unwrap();
        let wide = bessel_average_terms(big_k, x, &w, 2, 1000).unwrap();
        assert_eq!(wide.re, r.lhs);
    }

    #[test]
    fn main_term_within_budget() {
        let w = Window::default();
        for big_k in [50.0, 100.0] {
            let x = big_k * big_k / 2.0;
            let r = bessel_average(big_k, x, &w).unwrap();
            assert!(r.ratio() <= 10.0, "K={big_k}: {r:?}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let w = Window::default();
        assert!(bessel_average(10.0, 1.0, &w).is_err());
        assert!(bessel_average(50.0, 0.0, &w).is_err());
    }
}
