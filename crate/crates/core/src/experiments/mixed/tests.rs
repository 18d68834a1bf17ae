use std::f64::consts::PI;

use super::*;
use crate::geometry::{mixed_moment_geometric, triple_inner, VOLUME};

fn delta() -> HeckeEigenform {
    hecke_basis(12).unwrap()[0].clone()
}

#[test]
fn weight_range_splits_empty_spaces() {
    let (full, empty) = weight_range(12).unwrap();
    assert_eq!(full, [16, 18, 20, 22, 24]);
    assert_eq!(empty, [14]);
    assert!(weight_range(1).is_err());
}

#[test]
fn variance_matches_independent_assembly() {
    let g = delta();
    let r = variance_stat(12, &g).unwrap();
    assert!(r.value >= 0.0);
    // oracle: quadrature mixed moments, summed by hand
    let mut want = 0.0;
    for k in (14..=24).step_by(2) {
        if dim_cusp_space(k).unwrap() == 0 {
            continue;
        }
        for f in hecke_basis(k as u32).unwrap() {
            let m = mixed_moment_geometric(&f, &g).unwrap();
            want += (m - 1.0).powi(2);
        }
    }
    want /= 144.0;
    assert!(
        (r.value - want).abs() < 1e-10 * want,
        "{} vs {want}",
        r.value
    );
    assert_eq!(r.terms.len(), 6);
    assert_eq!(r.get_note("empty_weights"), Some("14"));
    assert!(r.error < 1e-9);
}

#[test]
fn variance_decreases_from_12_to_24() {
    let g = delta();
    let a = variance_stat(12, &g).unwrap().value;
    let b = variance_stat(24, &g).unwrap().value;
    assert!(b < a, "{b} vs {a}");
}

#[test]
fn expectation_is_the_weighted_mean() {
    let g = delta();
    let r = expectation_stat(12, &g).unwrap();
    assert!((r.value - 1.0).abs() < 0.5, "{}", r.value);
    // 2/K times per-weight means, S_14 empty
    let mut want = 0.0;
    for k in [16u32, 18, 20, 22, 24] {
        let forms = hecke_basis(k).unwrap();
        let mean: f64 = forms
            .iter()
            .map(|f| parseval_spectral(f, &g).unwrap())
            .sum::<f64>()
            / forms.len() as f64;
        want += mean / 6.0;
    }
    assert!((r.value - want).abs() < 1e-13, "{} vs {want}", r.value);
    assert!((r.term_sum() - r.value).abs() < 1e-15);
}

#[test]
fn extracted_values_invert_the_parseval_display() {
    let (f, g) = (delta(), hecke_basis(16).unwrap()[0].clone());
    let vals = triple_lvalues(&f, &g).unwrap();
    let l1f = l_one_sym2(&f).unwrap();
    let l1g = l_one_sym2(&g).unwrap();
    for (h, v) in &vals {
        assert!(*v >= -1e-8);
        // oracle: from the inner product of the rescaled forms
        let ip = triple_inner(&f, &g, h).unwrap();
        let want = ip * ip / (VOLUME * VOLUME) * 27.0 / (2.0 * PI * PI)
            * l_one_sym2(h).unwrap()
            * 2.0
            * l1f
            * l1g
            / (PI * PI / 6.0);
        assert!(
            (v - want).abs() < 1e-10 * want.abs().max(1e-300),
            "{v} vs {want}"
        );
        assert_eq!(extract_triple_lvalue(&f, &g, h).unwrap(), *v);
    }
    assert!(extract_triple_lvalue(&f, &g, &f).is_err());
}

#[test]
fn first_moment_closes_on_the_mixed_moment() {
    for (k, l) in [(12, 12), (12, 16), (16, 16)] {
        let f = hecke_basis(k).unwrap()[0].clone();
        let g = hecke_basis(l).unwrap()[0].clone();
        let r = first_moment_identity(&f, &g).unwrap();
        let mixed: f64 = r.get_note("mixed_moment").unwrap().parse().unwrap();
        assert!(
            (r.value / mixed - 1.0).abs() < 1e-6,
            "({k}, {l}): {} vs {mixed}",
            r.value
        );
    }
}

#[test]
fn delta_squared_has_a_nonzero_projection() {
    let recs = nonvanishing_scan(&[12, 14], &[12]).unwrap();
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert!(r.value > NONZERO);
    assert!(r.get_note("nonzero").unwrap().parse::<usize>().unwrap() >= 1);
    assert!(r.terms.iter().all(|t| t.value >= -1e-8));
}
