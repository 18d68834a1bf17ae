use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::line::integrate_doubling;
use super::maass::{MaassFormData, Parity};
use super::mixed::weight_range;
use super::record::ExperimentRecord;
use crate::error::{Error, Result};
use crate::lfun::{l_half_maass_with, l_half_rs_with, l_half_sym2_with, l_one_sym2, AfeOptions};
use crate::modforms::{dim_cusp_space, hecke_basis, HeckeEigenform};
use crate::special::Window;

fn require_even(phi: &MaassFormData) -> Result<()> {
    if phi.parity != Parity::Even {
        return Err(Error::invalid(format!(
            "{} is odd; the scan needs an even Maass form",
            phi.label()
        )));
    }
    Ok(())
}

fn forms_of(weights: &[u32]) -> Result<Vec<HeckeEigenform>> {
    let mut out = Vec::new();
    for &k in weights {
        if dim_cusp_space(k as i64)? > 0 {
            out.extend(hecke_basis(k)?);
        }
    }
    Ok(out)
}

fn label(f: &HeckeEigenform) -> String {
    format!("k={} f={}", f.weight(), f.index())
}

/// sum over K < k <= 2K and f in H_k of L(1/2, sym^2 f x phi), and the harmonic sum
/// M1 = sum_k W((k-1)/K) 2 pi^2/(k-1) sum_f L(1/2, sym^2 f x phi)/L(1, sym^2 f).
pub fn moment1_scan(
    big_k: u32,
    phi: &MaassFormData,
    window: &Window,
    opts: &AfeOptions,
) -> Result<(ExperimentRecord, ExperimentRecord)> {
    require_even(phi)?;
    let (inner, _) = weight_range(big_k)?;
    let kf = big_k as f64;
    let (lo, hi) = window.support();
    let harmonic: Vec<u32> = (2..)
        .step_by(2)
        .take_while(|&k| (k as f64 - 1.0) / kf < hi)
        .filter(|&k| window.evaluate((k as f64 - 1.0) / kf) != 0.0 && (k as f64 - 1.0) / kf > lo)
        .collect();
    let mut weights: Vec<u32> = inner.iter().chain(&harmonic).copied().collect();
    weights.sort_unstable();
    weights.dedup();
    let forms = forms_of(&weights)?;
    let values = forms
        .par_iter()
        .map(|f| l_half_rs_with(f, phi, opts))
        .collect::<Result<Vec<_>>>()?;

    let sqrt_k_exceeded = phi.t_phi > kf.sqrt();
    let start = |name: &str| {
        let mut r = ExperimentRecord::new(name)
            .param("K", big_k)
            .param("t_phi", phi.t_phi);
        if sqrt_k_exceeded {
            r.note("t_phi_above_sqrt_K", "true");
        }
        r
    };

    let mut plain = start("moment1");
    let mut weighted = start("moment1_harmonic");
    for (f, v) in forms.iter().zip(&values) {
        let k = f.weight();
        if inner.contains(&k) {
            plain.push_term(label(f), v.value);
            plain.error += v.error;
        }
        let w = window.evaluate((k as f64 - 1.0) / kf);
        if w != 0.0 {
            let c = w * 2.0 * PI * PI / (k as f64 - 1.0) / l_one_sym2(f)?;
            weighted.push_term(label(f), c * v.value);
            weighted.error += c * v.error;
        }
    }
    plain.value = plain.term_sum();
    plain.note_f64("ratio_K2", plain.value / (kf * kf));
    weighted.value = weighted.term_sum();
    weighted.note("window", window.label());
    weighted.note_f64("ratio_K", weighted.value / kf);
    for (r, v) in [(&mut plain, &values), (&mut weighted, &values)] {
        r.note("max_cutoff", v.iter().map(|x| x.cutoff).max().unwrap_or(0));
        r.check()?;
    }
    Ok((plain, weighted))
}

/// sum over K < k <= 2K and f in H_k of |L(1/2 + it, sym^2 f)|^2.
pub fn moment2_scan(big_k: u32, t: f64, opts: &AfeOptions) -> Result<ExperimentRecord> {
    if !t.is_finite() {
        return Err(Error::invalid("t must be finite"));
    }
    let (inner, _) = weight_range(big_k)?;
    let forms = forms_of(&inner)?;
    let values = forms
        .par_iter()
        .map(|f| l_half_sym2_with(f, t, opts))
        .collect::<Result<Vec<_>>>()?;
    let kf = big_k as f64;
    let mut r = ExperimentRecord::new("moment2")
        .param("K", big_k)
        .param("t", t);
    if t.abs() > kf.sqrt() {
        r.note("t_above_sqrt_K", "true");
    }
    for (f, v) in forms.iter().zip(&values) {
        let m = v.value.norm();
        r.push_term(label(f), m * m);
        r.error += 2.0 * m * v.error + v.error * v.error;
    }
    r.value = r.term_sum();
    r.note_f64("ratio_K2", r.value / (kf * kf));
    r.note(
        "max_cutoff",
        values.iter().map(|x| x.cutoff).max().unwrap_or(0),
    );
    r.check()?;
    Ok(r)
}

const T_ORDER: usize = 16;
const T_REL_TOL: f64 = 1e-8;
const T_MAX_PANELS: usize = 256;

fn sym2_abs_sq(g: &HeckeEigenform, t: f64, opts: &AfeOptions) -> Result<f64> {
    Ok(l_half_sym2_with(g, t, opts)?.value.norm_sqr())
}

/// int_{-T}^{T} |L(1/2 + it, sym^2 g)|^2 dt with a fixed number of panels on [0, T].
pub fn sym2_t_moment_fixed(
    g: &HeckeEigenform,
    big_t: f64,
    panels: usize,
    opts: &AfeOptions,
) -> Result<f64> {
    let f = |t: f64| sym2_abs_sq(g, t, opts);
    Ok(2.0 * super::line::integrate(&f, 0.0, big_t, panels.max(1), T_ORDER)?)
}

/// int_{-T}^{T} |L(1/2 + it, sym^2 g)|^2 dt; the integrand is even in t.
pub fn sym2_t_moment(
    g: &HeckeEigenform,
    big_t: f64,
    opts: &AfeOptions,
) -> Result<ExperimentRecord> {
    if !(big_t > 0.0 && big_t.is_finite()) {
        return Err(Error::invalid(format!("T = {big_t} must be positive")));
    }
    let ell = g.weight() as f64;
    let f = |t: f64| sym2_abs_sq(g, t, opts);
    let q = integrate_doubling(
        &f,
        0.0,
        big_t,
        big_t.ceil() as usize,
        T_ORDER,
        T_REL_TOL,
        T_MAX_PANELS,
    )?;
    let mut r = ExperimentRecord::new("sym2_t_moment")
        .param("l", g.weight())
        .param("g", g.index())
        .param("T", big_t);
    if big_t > ell.powf(0.6) {
        r.note("T_above_l^0.6", "true");
    }
    r.value = 2.0 * q.value;
    r.error = 2.0 * q.error;
    r.note("evaluations", q.evaluations);
    r.note_f64("ratio_l^1.25", r.value / ell.powf(1.25));
    r.check()?;
    Ok(r)
}

/// The spectral window used for the Maass sums: t <= l^{1/2 + 0.1}.
pub fn spectral_reach(ell: u32) -> f64 {
    (ell as f64).powf(0.6)
}

/// exp(-t^2 / l).
pub fn spectral_weight(t: f64, ell: u32) -> f64 {
    (-t * t / ell as f64).exp()
}

/// sum over even phi of L(1/2, phi) L(1/2, sym^2 g x phi) exp(-t_phi^2 / l).
pub fn mixed_moment_sum(
    g: &HeckeEigenform,
    spectrum: &[MaassFormData],
    opts: &AfeOptions,
) -> Result<ExperimentRecord> {
    let ell = g.weight() as f64;
    let even: Vec<&MaassFormData> = spectrum
        .iter()
        .filter(|p| p.parity == Parity::Even)
        .collect();
    let values = even
        .par_iter()
        .map(|phi| Ok((l_half_maass_with(phi, opts)?, l_half_rs_with(g, phi, opts)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut r = ExperimentRecord::new("mixed_moment_sum")
        .param("l", g.weight())
        .param("g", g.index());
    if even.is_empty() {
        r.note("warning", "empty spectrum");
    }
    for (phi, (a, b)) in even.iter().zip(&values) {
        let w = spectral_weight(phi.t_phi, g.weight());
        r.push_term(format!("t_phi={}", phi.t_phi), a.value * b.value * w);
        r.error += w * (a.error * b.value.abs() + b.error * a.value.abs() + a.error * b.error);
    }
    r.value = r.term_sum();
    let reach = spectral_reach(g.weight());
    r.note("odd_skipped", spectrum.len() - even.len());
    r.note(
        "even_in_reach",
        even.iter().filter(|p| p.t_phi <= reach).count(),
    );
    r.note_f64("reach", reach);
    r.note_f64("weyl_estimate", reach * reach / 12.0);
    r.note_f64("ratio_l^4/3", r.value / ell.powf(4.0 / 3.0));
    r.check()?;
    Ok(r)
}

/// sum_{n <= N} lambda(n) e(n alpha) over a coefficient table.
pub fn exp_sum(lambda: &[f64], n_max: usize, alpha: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, &l) in lambda.iter().enumerate().take(n_max + 1).skip(1) {
        let frac = (n as f64 * alpha).rem_euclid(1.0);
        acc += l * Complex64::from_polar(1.0, 2.0 * PI * frac);
    }
    acc
}

/// j/points for j = 0..points.
pub fn alpha_grid(points: usize) -> Vec<f64> {
    (0..points).map(|j| j as f64 / points as f64).collect()
}

/// max over `alphas` of |sum_{n <= N} lambda_phi(n) e(n alpha)| / (N t_phi)^{1/2}.
pub fn exp_sum_ratio(
    phi: &MaassFormData,
    n_max: usize,
    alphas: &[f64],
) -> Result<ExperimentRecord> {
    if n_max == 0 || alphas.is_empty() {
        return Err(Error::invalid("need N >= 1 and at least one alpha"));
    }
    let lambda = phi.table(n_max)?;
    let norm = (n_max as f64 * phi.t_phi).sqrt();
    let ratios: Vec<f64> = alphas
        .par_iter()
        .map(|&a| exp_sum(&lambda, n_max, a).norm() / norm)
        .collect();
    let mut r = ExperimentRecord::new("exp_sum_ratio")
        .param("t_phi", phi.t_phi)
        .param("N", n_max);
    let mut best = (0.0f64, alphas[0]);
    for (&a, &q) in alphas.iter().zip(&ratios) {
        r.push_term(format!("alpha={a}"), q);
        if q > best.0 {
            best = (q, a);
        }
    }
    r.value = best.0;
    r.error = n_max as f64 * f64::EPSILON * lambda[1..].iter().map(|v| v.abs()).fold(0.0, f64::max)
        / norm;
    r.note_f64("argmax_alpha", best.1);
    r.note_f64("partial_sum", lambda[1..=n_max].iter().sum());
    r.note("alphas", alphas.len());
    r.check()?;
    Ok(r)
}

#[cfg(test)]
mod tests;
