use rayon::prelude::*;

use super::line::gl_nodes;
use super::maass::{MaassFormData, Parity};
use super::mixed::weight_range;
use super::moments::spectral_reach;
use super::record::ExperimentRecord;
use crate::error::Result;
use crate::lfun::{
    l_half_maass_with, l_half_rs_with, l_half_sym2_with, l_one_sym2, l_one_sym2_maass, AfeOptions,
};
use crate::modforms::{hecke_basis, HeckeEigenform};
use crate::special::zeta_line;

use num_complex::Complex64;

const SE_ORDER: usize = 8;
/// Panels per unit length of t in the fine Eisenstein rule; the coarse rule uses half.
const SE_DENSITY: f64 = 2.0;

/// |zeta(1/2+it)|^2 / |zeta(1+2it)|^2, which vanishes at t = 0.
pub fn eisenstein_weight(t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let a = zeta_line(Complex64::new(0.5, t))?.norm_sqr();
    let b = zeta_line(Complex64::new(1.0, 2.0 * t))?.norm_sqr();
    Ok(a / b)
}

/// The Eisenstein integrand |zeta(1/2+it)|^2 |L(1/2+it, sym^2 f) L(1/2+it, sym^2 g)| /
/// (L(1, sym^2 f) L(1, sym^2 g) |zeta(1+2it)|^2).
pub fn se_integrand(
    f: &HeckeEigenform,
    g: &HeckeEigenform,
    t: f64,
    opts: &AfeOptions,
) -> Result<f64> {
    let lf = l_half_sym2_with(f, t, opts)?.value.norm();
    let lg = l_half_sym2_with(g, t, opts)?.value.norm();
    Ok(eisenstein_weight(t)? * lf * lg / (l_one_sym2(f)? * l_one_sym2(g)?))
}

struct SpectralData {
    phi: MaassFormData,
    l_half: f64,
    rs_g: f64,
    l_one: f64,
}

/// The cusp and Eisenstein bounding sums at (K, g):
/// S_c = 1/(K^3 l) sum_k sum_f |sum_phi L(1/2,phi) L(1/2,sym^2 f x phi)^{1/2} L(1/2,sym^2 g x phi)^{1/2}
///       e^{-t^2/2l} / (L(1,sym^2 f) L(1,sym^2 g) L(1,sym^2 phi))|^2,
/// S_e = 1/(K^3 l) sum_k sum_f |int_{|t| <= l^{0.6}} (Eisenstein integrand) dt|^2.
pub fn sc_se_eval(
    big_k: u32,
    g: &HeckeEigenform,
    spectrum: &[MaassFormData],
    opts: &AfeOptions,
) -> Result<(ExperimentRecord, ExperimentRecord)> {
    let (weights, _) = weight_range(big_k)?;
    let mut forms = Vec::new();
    for &k in &weights {
        forms.extend(hecke_basis(k)?);
    }
    let ell = g.weight() as f64;
    let kf = big_k as f64;
    let norm = kf.powi(3) * ell;
    let l1g = l_one_sym2(g)?;

    let data = spectrum
        .iter()
        .filter(|p| p.parity == Parity::Even)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|phi| {
            Ok(SpectralData {
                phi: (*phi).clone(),
                l_half: l_half_maass_with(phi, opts)?.value,
                rs_g: l_half_rs_with(g, phi, opts)?.value,
                l_one: l_one_sym2_maass(phi)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let start = |name: &str| {
        let mut r = ExperimentRecord::new(name)
            .param("K", big_k)
            .param("l", g.weight())
            .param("g", g.index());
        r.note("forms", forms.len());
        r
    };

    let mut cusp = start("S_c");
    cusp.note("even_forms", data.len());
    let cusp_terms = forms
        .par_iter()
        .map(|f| {
            let l1f = l_one_sym2(f)?;
            let mut inner = 0.0;
            let mut err = 0.0;
            for d in &data {
                let v = l_half_rs_with(f, &d.phi, opts)?;
                let w = (-d.phi.t_phi * d.phi.t_phi / (2.0 * ell)).exp() / (l1f * l1g * d.l_one);
                let root = (v.value.max(0.0) * d.rs_g.max(0.0)).sqrt();
                inner += d.l_half * root * w;
                // d sqrt(x) = dx / (2 sqrt(x)), capped where x is tiny
                err += d.l_half * w * v.error * d.rs_g.max(0.0).sqrt()
                    / (2.0 * v.value.max(v.error).sqrt());
            }
            Ok((inner, err))
        })
        .collect::<Result<Vec<_>>>()?;
    for (f, (inner, err)) in forms.iter().zip(&cusp_terms) {
        cusp.push_term(
            format!("k={} f={}", f.weight(), f.index()),
            inner * inner / norm,
        );
        cusp.error += (2.0 * inner.abs() * err + err * err) / norm;
    }
    cusp.value = cusp.term_sum();
    cusp.note_f64("envelope_ratio", cusp.value / (ell.powf(4.0 / 3.0) / kf));
    cusp.check()?;

    // both rules on [0, T]; the integrand is even in t
    let reach = spectral_reach(g.weight());
    let panels = (SE_DENSITY * reach).ceil() as usize;
    let fine = gl_nodes(0.0, reach, panels, SE_ORDER);
    let coarse = gl_nodes(0.0, reach, panels.div_ceil(2), SE_ORDER);
    let mut ts: Vec<f64> = fine.iter().chain(&coarse).map(|n| n.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let shared = ts
        .par_iter()
        .map(|&t| Ok(eisenstein_weight(t)? * l_half_sym2_with(g, t, opts)?.value.norm() / l1g))
        .collect::<Result<Vec<f64>>>()?;
    let at = |t: f64| {
        ts.binary_search_by(|x| x.total_cmp(&t))
            .expect("node was tabulated")
    };

    let mut eis = start("S_e");
    let eis_terms = forms
        .par_iter()
        .map(|f| {
            let l1f = l_one_sym2(f)?;
            let vals = ts
                .iter()
                .map(|&t| Ok(l_half_sym2_with(f, t, opts)?.value.norm() / l1f))
                .collect::<Result<Vec<f64>>>()?;
            let rule = |nodes: &[(f64, f64)]| -> f64 {
                2.0 * nodes
                    .iter()
                    .map(|&(t, w)| w * vals[at(t)] * shared[at(t)])
                    .sum::<f64>()
            };
            let (a, b) = (rule(&fine), rule(&coarse));
            Ok((a, (a - b).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    for (f, (integral, err)) in forms.iter().zip(&eis_terms) {
        eis.push_term(
            format!("k={} f={}", f.weight(), f.index()),
            integral * integral / norm,
        );
        eis.error += (2.0 * integral.abs() * err + err * err) / norm;
    }
    eis.value = eis.term_sum();
    eis.note_f64("reach", reach);
    eis.note("nodes", ts.len());
    eis.note_f64("envelope_ratio", eis.value / (ell.powf(0.75) / kf));
    eis.check()?;
    Ok((cusp, eis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::ingest_maass;

    #[test]
    fn integrand_is_a_product_of_standalone_values() {
        let f = &hecke_basis(16).unwrap()[0];
        let g = &hecke_basis(12).unwrap()[0];
        let opts = AfeOptions::default();
        let t = 0.7;
        let z = zeta_line(Complex64::new(0.5, t)).unwrap().norm_sqr()
            / zeta_line(Complex64::new(1.0, 1.4)).unwrap().norm_sqr();
        let want = z
            * l_half_sym2_with(f, t, &opts).unwrap().value.norm()
            * l_half_sym2_with(g, t, &opts).unwrap().value.norm()
            / (l_one_sym2(f).unwrap() * l_one_sym2(g).unwrap());
        assert_eq!(se_integrand(f, g, t, &opts).unwrap(), want);
        assert_eq!(se_integrand(f, g, 0.0, &opts).unwrap(), 0.0);
        // zeta(1 + 2it) ~ 1/(2it) near 0
        let small = eisenstein_weight(1e-4).unwrap();
        let lim = zeta_line(Complex64::new(0.5, 0.0)).unwrap().norm_sqr() * 4e-8;
        assert!((small / lim - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cusp_and_eisenstein_sums() {
        let spec = ingest_maass(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../data/maass/sl2z_forms.txt"
        ))
        .unwrap();
        let g = &hecke_basis(12).unwrap()[0];
        let opts = AfeOptions::default();
        let (c, e) = sc_se_eval(12, g, &spec, &opts).unwrap();
        assert!(c.value >= 0.0 && e.value > 0.0);
        assert_eq!(c.terms.len(), 6);
        assert_eq!(e.terms.len(), 6);
        assert!(e.error < 1e-2 * e.value, "{} +- {}", e.value, e.error);
        // the Delta-only cusp term, assembled by hand
        let f = &hecke_basis(24).unwrap()[0];
        let mut inner = 0.0;
        for phi in spec.iter().filter(|p| p.parity == Parity::Even) {
            let a = l_half_maass_with(phi, &opts).unwrap().value;
            let b = l_half_rs_with(f, phi, &opts).unwrap().value;
            let d = l_half_rs_with(g, phi, &opts).unwrap().value;
            let w = (-phi.t_phi * phi.t_phi / 24.0).exp();
            inner += a * (b * d).sqrt() * w
                / (l_one_sym2(f).unwrap()
                    * l_one_sym2(g).unwrap()
                    * l_one_sym2_maass(phi).unwrap().value);
        }
        let term = c
            .terms
            .iter()
            .find(|t| t.label == "k=24 f=0")
            .unwrap()
            .value;
        assert!((term - inner * inner / (1728.0 * 12.0)).abs() < 1e-12 * term);
    }
}
