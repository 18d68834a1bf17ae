use std::collections::BTreeMap;

use super::*;
use crate::io::ingest_maass;
use std::f64::consts::PI;

fn spectrum() -> Vec<MaassFormData> {
    ingest_maass(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/maass/sl2z_forms.txt"
    ))
    .unwrap()
}

fn delta() -> HeckeEigenform {
    hecke_basis(12).unwrap()[0].clone()
}

#[test]
fn moment1_terms_are_standalone_values() {
    let phi = &spectrum()[0];
    let opts = AfeOptions::default();
    let (plain, weighted) = moment1_scan(12, phi, &Window::default(), &opts).unwrap();
    assert!(plain
        .terms
        .iter()
        .chain(&weighted.terms)
        .all(|t| t.value >= -1e-6));
    assert_eq!(plain.terms.len(), 6);
    assert_eq!(plain.get_note("t_phi_above_sqrt_K"), Some("true"));
    let f = &hecke_basis(24).unwrap()[1];
    let term = plain.terms.iter().find(|t| t.label == "k=24 f=1").unwrap();
    assert_eq!(term.value, l_half_rs_with(f, phi, &opts).unwrap().value);
    // harmonic weights over (k-1)/12 in (0.5, 3): k = 8..=36, k != 14
    let w = Window::default();
    let d = delta();
    let want = w.evaluate(11.0 / 12.0) * 2.0 * PI * PI / 11.0
        * l_half_rs_with(&d, phi, &opts).unwrap().value
        / l_one_sym2(&d).unwrap();
    let got = weighted
        .terms
        .iter()
        .find(|t| t.label == "k=12 f=0")
        .unwrap()
        .value;
    assert!((got - want).abs() < 1e-14 * want.abs());
    assert_eq!(weighted.terms.first().unwrap().label, "k=12 f=0");
    assert!(weighted.terms.iter().all(|t| !t.label.starts_with("k=38")));
}

#[test]
fn moment1_needs_even_form() {
    let odd = spectrum()
        .into_iter()
        .find(|p| p.parity == Parity::Odd)
        .unwrap();
    assert!(moment1_scan(12, &odd, &Window::default(), &AfeOptions::default()).is_err());
}

#[test]
fn moment2_symmetric_in_t() {
    let opts = AfeOptions::default();
    let a = moment2_scan(12, 0.5, &opts).unwrap();
    let b = moment2_scan(12, -0.5, &opts).unwrap();
    let z = moment2_scan(12, 0.0, &opts).unwrap();
    assert!((a.value - b.value).abs() < 1e-9);
    assert!(a.terms.iter().all(|t| t.value >= 0.0));
    assert!(z.value.is_finite() && z.value > 0.0);
    assert!((a.term_sum() - a.value).abs() < 1e-15);
}

#[test]
fn sym2_t_moment_stable_under_doubling() {
    let g = delta();
    let opts = AfeOptions::default();
    let r = sym2_t_moment(&g, 3.0, &opts).unwrap();
    assert!(r.value > 0.0);
    let coarse = sym2_t_moment_fixed(&g, 3.0, 2, &opts).unwrap();
    let fine = sym2_t_moment_fixed(&g, 3.0, 4, &opts).unwrap();
    assert!((fine - coarse).abs() < 0.01 * fine);
    assert!((r.value - fine).abs() < 1e-6 * fine);
    assert!(sym2_t_moment(&g, -1.0, &opts).is_err());
}

#[test]
fn mixed_sum_terms_factor() {
    let g = delta();
    let spec = spectrum();
    let opts = AfeOptions::default();
    let r = mixed_moment_sum(&g, &spec[..1], &opts).unwrap();
    let phi = &spec[0];
    let want = l_half_maass_with(phi, &opts).unwrap().value
        * l_half_rs_with(&g, phi, &opts).unwrap().value
        * (-phi.t_phi * phi.t_phi / 12.0).exp();
    assert!((r.value - want).abs() < 1e-15 * want);
    assert!(r.value >= -1e-6);
    let all = mixed_moment_sum(&g, &spec, &opts).unwrap();
    assert_eq!(all.terms.len(), 3);
    assert_eq!(all.get_note("odd_skipped"), Some("1"));
    // t = 3 sqrt(l) is damped by e^{-9}
    assert!((spectral_weight(3.0 * 12f64.sqrt(), 12) - (-9f64).exp()).abs() < 1e-18);
    let empty = mixed_moment_sum(&g, &[], &opts).unwrap();
    assert_eq!(empty.value, 0.0);
    assert_eq!(empty.get_note("warning"), Some("empty spectrum"));
}

#[test]
fn exp_sum_basics() {
    let phi = &spectrum()[0];
    let one = exp_sum_ratio(phi, 1, &[0.0, 0.37]).unwrap();
    assert!((one.value - phi.t_phi.powf(-0.5)).abs() < 1e-15);
    let lam = phi.table(500).unwrap();
    let plain: f64 = lam[1..=500].iter().sum();
    assert!((exp_sum(&lam, 500, 0.0).re - plain).abs() < 1e-12);
    assert_eq!(exp_sum(&lam, 500, 0.0).im, 0.0);
    // oracle: direct cos/sin sum
    let a = 0.3217;
    let mut want = num_complex::Complex64::new(0.0, 0.0);
    for (n, l) in lam.iter().enumerate().skip(1) {
        let th = 2.0 * PI * a * n as f64;
        want += *l * num_complex::Complex64::new(th.cos(), th.sin());
    }
    assert!((exp_sum(&lam, 500, a) - want).norm() < 1e-9);
}

#[test]
fn exp_sum_ratio_bounded() {
    let phi = &spectrum()[0];
    let r = exp_sum_ratio(phi, 10_000, &alpha_grid(256)).unwrap();
    assert!(r.value <= 100.0, "{}", r.value);
    assert_eq!(r.terms.len(), 256);
    let short = MaassFormData::new(
        10.0,
        Parity::Even,
        BTreeMap::from([(1, 1.0), (2, 0.5)]),
        "short",
    );
    assert!(matches!(
        exp_sum_ratio(&short, 100, &[0.0]),
        Err(Error::DataExhausted { .. })
    ));
}
