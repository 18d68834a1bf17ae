use std::f64::consts::PI;

use num_complex::Complex64;

use super::kernel::{ContourKernel, Smoothing};
use super::values::{log_gamma_rs, log_gamma_sym2};
use crate::error::{Error, Result};
use crate::special::bernoulli::bernoulli_numbers;
use crate::special::log_gamma;

const DEFAULT_EPS: f64 = 0.5;

fn height_for(scale: f64) -> f64 {
    (4.0 * scale.ln()).max(30.0)
}

fn single(kernel: &ContourKernel, y: f64) -> Result<Complex64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid(format!(
            "kernel argument y = {y} must be positive"
        )));
    }
    Ok(kernel.eval(y))
}

/// V_3^+(y; t) for weight k on the default contour.
pub fn kernel_v3(y: f64, t: f64, k: u32) -> Result<Complex64> {
    kernel_v3_eps(y, t, k, DEFAULT_EPS)
}

/// V_3^+(y; t) on the contour Re s = eps.
pub fn kernel_v3_eps(y: f64, t: f64, k: u32, eps: f64) -> Result<Complex64> {
    let center = Complex64::new(0.5, t);
    let lg0 = log_gamma_sym2(k, center)?;
    let ratio = |s: Complex64| Ok(log_gamma_sym2(k, center + s)? - lg0);
    let scale = k as f64 * (1.0 + t.abs()).sqrt();
    let x = y.ln();
    let kernel = ContourKernel::build(
        &ratio,
        Some(center),
        Smoothing::Gaussian,
        eps,
        height_for(scale),
        (x, x),
    )?;
    single(&kernel, y)
}

/// V_3^-(y; t) = L_inf(1/2 - it)/L_inf(1/2 + it) V_3^+(y; -t).
pub fn kernel_v3_minus(y: f64, t: f64, k: u32) -> Result<Complex64> {
    let factor = (log_gamma_sym2(k, Complex64::new(0.5, -t))?
        - log_gamma_sym2(k, Complex64::new(0.5, t))?)
    .exp();
    Ok(factor * kernel_v3(y, -t, k)?)
}

/// V_6(y) for weight k and an even Maass form with parameter t_phi.
pub fn kernel_v6(y: f64, k: u32, t_phi: f64) -> Result<f64> {
    kernel_v6_eps(y, k, t_phi, DEFAULT_EPS)
}

pub fn kernel_v6_eps(y: f64, k: u32, t_phi: f64, eps: f64) -> Result<f64> {
    let half = Complex64::new(0.5, 0.0);
    let lg0 = log_gamma_rs(k, t_phi, half)?;
    let ratio = |s: Complex64| Ok(log_gamma_rs(k, t_phi, half + s)? - lg0);
    v6_from(&ratio, y, k, t_phi, eps)
}

fn v6_from(
    ratio: &(dyn Fn(Complex64) -> Result<Complex64> + Sync),
    y: f64,
    k: u32,
    t_phi: f64,
    eps: f64,
) -> Result<f64> {
    let scale = (k as f64).powi(2) * t_phi.max(1.0);
    let x = y.ln();
    let kernel = ContourKernel::build(
        ratio,
        None,
        Smoothing::Gaussian,
        eps,
        height_for(scale),
        (x, x),
    )?;
    let v = single(&kernel, y)?;
    if v.im.abs() > 1e-10 {
        return Err(Error::Anomaly(format!(
            "V6({y}) has imaginary part {:e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// B_n(a) for n = 0..=deg.
fn bernoulli_polys(a: Complex64, deg: usize, b: &[f64]) -> Vec<Complex64> {
    (0..=deg)
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut binom = 1.0;
            for (j, bj) in b.iter().enumerate().take(n + 1) {
                acc += binom * bj * a.powu((n - j) as u32);
                binom *= (n - j) as f64 / (j + 1) as f64;
            }
            acc
        })
        .collect()
}

/// log G(z + a) - log G(z + a0) by the large-z expansion with `terms` correction terms.
fn shifted_log_gamma_ratio(
    z: f64,
    a: Complex64,
    a0: Complex64,
    terms: usize,
    b: &[f64],
) -> Complex64 {
    let pa = bernoulli_polys(a, terms + 1, b);
    let p0 = bernoulli_polys(a0, terms + 1, b);
    let mut acc = (a - a0) * z.ln();
    for n in 2..=terms + 1 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * (pa[n] - p0[n]) / ((n * (n - 1)) as f64 * z.powi(n as i32 - 1));
    }
    acc
}

/// V_6(y) with the k-dependent gamma factors replaced by their expansion in 1/k,
/// (k/2)^{2s} times a series in 1/k, keeping `terms` orders.
pub fn kernel_v6_stirling(y: f64, k: u32, t_phi: f64, terms: usize) -> Result<f64> {
    let b: Vec<f64> = bernoulli_numbers(terms + 2)
        .iter()
        .map(|r| r.to_f64())
        .collect();
    let z = k as f64 / 2.0;
    let fixed = |s: Complex64| -> Result<Complex64> {
        let mut acc = -3.0 * s * PI.ln();
        for sign in [1.0, -1.0] {
            let it = Complex64::new(0.0, sign * t_phi);
            acc += log_gamma((s + 1.5 + it) / 2.0)? - log_gamma((1.5 + it) / 2.0)?;
        }
        Ok(acc)
    };
    let ratio = |s: Complex64| -> Result<Complex64> {
        let mut acc = fixed(s)?;
        for sign in [1.0, -1.0] {
            let it = Complex64::new(0.0, sign * t_phi);
            for shift in [-0.5, 0.5] {
                let a0 = (it + shift) / 2.0;
                acc += shifted_log_gamma_ratio(z, a0 + s / 2.0, a0, terms, &b);
            }
        }
        Ok(acc)
    };
    v6_from(&ratio, y, k, t_phi, DEFAULT_EPS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_expansion_matches_log_gamma() {
        let b: Vec<f64> = bernoulli_numbers(20).iter().map(|r| r.to_f64()).collect();
        let z = 20.0;
        let a = Complex64::new(0.7, 2.5);
        let a0 = Complex64::new(-0.25, 1.0);
        let want = log_gamma(z + a).unwrap() - log_gamma(z + a0).unwrap();
        let got = shifted_log_gamma_ratio(z, a, a0, 16, &b);
        assert!((got - want).norm() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn v3_contour_shift() {
        for (y, t, k) in [
            (12.0, 0.0, 12u32),
            (3.0, 1.5, 16),
            (40.0, 2.0, 24),
            (1.0, 0.0, 40),
        ] {
            let a = kernel_v3_eps(y, t, k, 0.3).unwrap();
            let b = kernel_v3_eps(y, t, k, 0.7).unwrap();
            assert!((a - b).norm() < 1e-9, "y={y} t={t} k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn v3_decays() {
        for (t, k) in [(0.0, 12u32), (2.0, 20), (3.0, 30)] {
            let y = (k as f64).powf(1.2) * (1.0 + t) * 1e3;
            let v = kernel_v3(y, t, k).unwrap();
            assert!(v.norm() < 1e-8, "t={t} k={k}: {v}");
        }
    }

    #[test]
    fn v3_minus_definition() {
        let k = 12;
        let (y, t) = (10.0, 3.0);
        let direct = kernel_v3_minus(y, t, k).unwrap();
        // independent assembly: conjugate symmetry V_3^+(y; -t) = conj V_3^+(y; t)
        let plus = kernel_v3(y, t, k).unwrap().conj();
        let factor = (log_gamma_sym2(k, Complex64::new(0.5, -t)).unwrap()
            - log_gamma_sym2(k, Complex64::new(0.5, t)).unwrap())
        .exp();
        assert!((direct - factor * plus).norm() < 1e-9);
        assert!((factor.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn v6_limits() {
        let v = kernel_v6(1e-6, 12, 13.78).unwrap();
        assert!((v - 1.0).abs() < 1e-4, "{v}");
        for (k, t) in [(12u32, 13.78f64), (20, 3.0), (40, 6.0)] {
            let y = 10.0 * (k as f64).powi(2) * t.max(1.0);
            assert!(kernel_v6(y, k, t).unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn v6_contour_shift() {
        for (y, k, t) in [(50.0, 12u32, 13.78), (400.0, 24, 4.0), (2.0, 40, 6.0)] {
            let a = kernel_v6_eps(y, k, t, 0.2).unwrap();
            let b = kernel_v6_eps(y, k, t, 0.8).unwrap();
            assert!((a - b).abs() < 1e-9, "y={y} k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn v6_stirling_cross_check() {
        let k = 40;
        let y = (k * k) as f64;
        for t in [2.0, 6.0] {
            let exact = kernel_v6(y, k, t).unwrap();
            let approx = kernel_v6_stirling(y, k, t, 10).unwrap();
            assert!((exact - approx).abs() < 1e-6, "t={t}: {exact} vs {approx}");
            // the leading order alone is visibly worse
            let lead = kernel_v6_stirling(y, k, t, 0).unwrap();
            assert!((exact - lead).abs() > (exact - approx).abs());
        }
    }
}
