use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::afe::{AFEDescriptor, AfeOptions, LValue};
use crate::arith::numtheory::multiplicative_table;
use crate::arith::{rs_coeffs, CoefficientStream};
use crate::error::{Error, Result};
use crate::experiments::{MaassFormData, Parity};
use crate::modforms::{prime_power_from, HeckeEigenform};
use crate::special::log_gamma;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// log L_inf(s, sym^2 f) = -(3s/2) log pi + log G((s+1)/2) + log G((s+k-1)/2) + log G((s+k)/2).
pub fn log_gamma_sym2(k: u32, s: Complex64) -> Result<Complex64> {
    let k = k as f64;
    Ok(-1.5 * s * PI.ln()
        + log_gamma((s + 1.0) / 2.0)?
        + log_gamma((s + k - 1.0) / 2.0)?
        + log_gamma((s + k) / 2.0)?)
}

/// log L_inf(s, sym^2 f x phi) for an even Maass form with spectral parameter t.
pub fn log_gamma_rs(k: u32, t: f64, s: Complex64) -> Result<Complex64> {
    let k = k as f64;
    let mut acc = -3.0 * s * PI.ln();
    for sign in [1.0, -1.0] {
        let it = c(0.0, sign * t);
        acc += log_gamma((s + 1.0 + it) / 2.0)?
            + log_gamma((s + k - 1.0 + it) / 2.0)?
            + log_gamma((s + k + it) / 2.0)?;
    }
    Ok(acc)
}

/// log L_inf(s, phi) = -s log pi + sum_pm log G((s + delta +- it)/2), delta = 0 or 1 by parity.
pub fn log_gamma_maass(t: f64, parity: Parity, s: Complex64) -> Result<Complex64> {
    let delta = match parity {
        Parity::Even => 0.0,
        Parity::Odd => 1.0,
    };
    Ok(-s * PI.ln()
        + log_gamma((s + delta + c(0.0, t)) / 2.0)?
        + log_gamma((s + delta - c(0.0, t)) / 2.0)?)
}

/// log L_inf(s, sym^2 phi) = -(3s/2) log pi + log G(s/2) + sum_pm log G((s +- 2it)/2), either parity.
pub fn log_gamma_sym2_maass(t: f64, s: Complex64) -> Result<Complex64> {
    Ok(-1.5 * s * PI.ln()
        + log_gamma(s / 2.0)?
        + log_gamma((s + c(0.0, 2.0 * t)) / 2.0)?
        + log_gamma((s - c(0.0, 2.0 * t)) / 2.0)?)
}

type StreamCache = Mutex<HashMap<usize, (HeckeEigenform, Arc<CoefficientStream>)>>;

/// lambda_f(n^2) as a stream, shared per eigenform.
pub fn square_coeffs(f: &HeckeEigenform) -> Arc<CoefficientStream> {
    static CACHE: OnceLock<StreamCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("square cache poisoned");
    let entry = guard.entry(f.id()).or_insert_with(|| {
        let g = f.clone();
        let stream = CoefficientStream::new(
            3,
            format!("lambda(n^2) k={} #{}", f.weight(), f.index()),
            move |len| {
                let lam = g.lambdas(len);
                Ok(multiplicative_table(len, |p, e| {
                    prime_power_from(lam[p as usize], 2 * e)
                }))
            },
        );
        (f.clone(), Arc::new(stream))
    });
    entry.1.clone()
}

/// zeta(2s) sum lambda_f(n^2) n^{-s} = L(s, sym^2 f).
pub fn sym2_descriptor(f: &HeckeEigenform) -> Result<AFEDescriptor> {
    let k = f.weight();
    AFEDescriptor::new(
        square_coeffs(f),
        move |s| log_gamma_sym2(k, s),
        true,
        k as f64,
        1.0,
    )
}

pub fn rs_descriptor(f: &HeckeEigenform, phi: &MaassFormData) -> Result<AFEDescriptor> {
    if phi.parity != Parity::Even {
        return Err(Error::invalid(
            "the Rankin-Selberg gamma factor here is for even Maass forms",
        ));
    }
    let k = f.weight();
    let t = phi.t_phi;
    let scale = (k as f64).powi(2) * t.max(1.0);
    AFEDescriptor::new(
        Arc::new(rs_coeffs(f, phi)),
        move |s| log_gamma_rs(k, t, s),
        false,
        scale,
        1.0,
    )
}

pub fn maass_descriptor(phi: &MaassFormData) -> Result<AFEDescriptor> {
    let data = phi.clone();
    let stream = CoefficientStream::new(2, format!("phi {}", phi.label()), move |len| {
        data.table(len)
    });
    let (t, parity) = (phi.t_phi, phi.parity);
    let root = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    AFEDescriptor::new(
        Arc::new(stream),
        move |s| log_gamma_maass(t, parity, s),
        false,
        t.max(1.0),
        root,
    )
}

/// zeta(2s) sum lambda_phi(n^2) n^{-s} = L(s, sym^2 phi).
pub fn sym2_maass_descriptor(phi: &MaassFormData) -> Result<AFEDescriptor> {
    let data = phi.clone();
    let stream = CoefficientStream::new(3, format!("lambda(n^2) {}", phi.label()), move |len| {
        let lam = data.table(len)?;
        Ok(multiplicative_table(len, |p, e| {
            prime_power_from(lam[p as usize], 2 * e)
        }))
    });
    let t = phi.t_phi;
    AFEDescriptor::new(
        Arc::new(stream),
        move |s| log_gamma_sym2_maass(t, s),
        true,
        t.max(1.0).powi(2),
        1.0,
    )
}

/// L(1, sym^2 phi), positive.
pub fn l_one_sym2_maass(phi: &MaassFormData) -> Result<LValue<f64>> {
    let v = sym2_maass_descriptor(phi)?.evaluate(c(1.0, 0.0), &AfeOptions::default())?;
    if v.value.re <= 0.0 || v.value.im.abs() > 1e-8 + v.error {
        return Err(Error::Anomaly(format!(
            "L(1, sym2 phi) = {} for {}",
            v.value,
            phi.label()
        )));
    }
    Ok(LValue {
        value: v.value.re,
        error: v.error,
        cutoff: v.cutoff,
    })
}

/// L(1/2 + it, sym^2 f).
pub fn l_half_sym2(f: &HeckeEigenform, t: f64) -> Result<LValue<Complex64>> {
    l_half_sym2_with(f, t, &AfeOptions::default())
}

pub fn l_half_sym2_with(
    f: &HeckeEigenform,
    t: f64,
    opts: &AfeOptions,
) -> Result<LValue<Complex64>> {
    sym2_descriptor(f)?.evaluate(c(0.5, t), opts)
}

/// L(1/2, sym^2 f x phi), real and nonnegative.
pub fn l_half_rs(f: &HeckeEigenform, phi: &MaassFormData) -> Result<LValue<f64>> {
    l_half_rs_with(f, phi, &AfeOptions::default())
}

pub fn l_half_rs_with(
    f: &HeckeEigenform,
    phi: &MaassFormData,
    opts: &AfeOptions,
) -> Result<LValue<f64>> {
    let v = rs_descriptor(f, phi)?.evaluate(c(0.5, 0.0), opts)?;
    real_nonnegative(
        v,
        &format!("L(1/2, sym2 f x phi) for k={} {}", f.weight(), phi.label()),
    )
}

/// L(1/2, phi).
pub fn l_half_maass(phi: &MaassFormData) -> Result<LValue<f64>> {
    l_half_maass_with(phi, &AfeOptions::default())
}

pub fn l_half_maass_with(phi: &MaassFormData, opts: &AfeOptions) -> Result<LValue<f64>> {
    let v = maass_descriptor(phi)?.evaluate(c(0.5, 0.0), opts)?;
    real_nonnegative(v, &format!("L(1/2, phi) for {}", phi.label()))
}

fn real_nonnegative(v: LValue<Complex64>, what: &str) -> Result<LValue<f64>> {
    if v.value.im.abs() > 1e-8 + v.error {
        return Err(Error::Anomaly(format!(
            "{what} has imaginary part {:e}",
            v.value.im
        )));
    }
    if v.value.re < -1e-6 {
        return Err(Error::Anomaly(format!(
            "{what} = {:e} is negative",
            v.value.re
        )));
    }
    Ok(LValue {
        value: v.value.re,
        error: v.error,
        cutoff: v.cutoff,
    })
}

/// L(1, sym^2 f) by the same machinery centred at s = 1, uncached.
pub fn l_one_sym2_value(f: &HeckeEigenform) -> Result<LValue<f64>> {
    let v = sym2_descriptor(f)?.evaluate(c(1.0, 0.0), &AfeOptions::default())?;
    if v.value.re <= 0.0 {
        return Err(Error::Anomaly(format!(
            "L(1, sym2 f) = {:e} is not positive for k={} #{}",
            v.value.re,
            f.weight(),
            f.index()
        )));
    }
    Ok(LValue {
        value: v.value.re,
        error: v.error,
        cutoff: v.cutoff,
    })
}

/// L(1, sym^2 f), stored on the eigenform after the first call.
pub fn l_one_sym2(f: &HeckeEigenform) -> Result<f64> {
    f.l1_sym2_or_init(|| l_one_sym2_value(f).map(|v| v.value))
}
