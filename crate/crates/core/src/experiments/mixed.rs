use std::f64::consts::PI;

use rayon::prelude::*;

use super::record::ExperimentRecord;
use crate::error::{Error, Result};
use crate::geometry::{mixed_moment_geometric, parseval_spectral, spectral_expansion};
use crate::lfun::l_one_sym2;
use crate::modforms::{dim_cusp_space, hecke_basis, HeckeEigenform};

/// Relative accuracy assumed for a spectral mixed moment before any spot-check.
const SPECTRAL_REL: f64 = 1e-12;
/// Spot-checks that disagree by more than this make the scan fail.
const SPOT_TOL: f64 = 1e-6;

/// Even weights in (K, 2K], split into nonempty and empty cusp spaces.
pub fn weight_range(big_k: u32) -> Result<(Vec<u32>, Vec<u32>)> {
    if big_k < 2 {
        return Err(Error::invalid(format!("K = {big_k} is too small")));
    }
    let mut full = Vec::new();
    let mut empty = Vec::new();
    for k in (big_k + 1..=2 * big_k).filter(|k| k % 2 == 0) {
        if dim_cusp_space(k as i64)? == 0 {
            empty.push(k);
        } else {
            full.push(k);
        }
    }
    Ok((full, empty))
}

/// One mixed moment <|F|^2, |G|^2>/vol in a scan.
#[derive(Clone, Debug)]
pub(crate) struct PairMoment {
    pub k: u32,
    pub index: usize,
    pub value: f64,
}

struct MixedScan {
    pairs: Vec<PairMoment>,
    empty: Vec<u32>,
    spot_rel: f64,
}

fn mixed_scan(big_k: u32, g: &HeckeEigenform) -> Result<MixedScan> {
    let (full, empty) = weight_range(big_k)?;
    let mut forms = Vec::new();
    for &k in &full {
        forms.extend(hecke_basis(k)?);
    }
    let pairs = forms
        .par_iter()
        .map(|f| {
            Ok(PairMoment {
                k: f.weight(),
                index: f.index(),
                value: parseval_spectral(f, g)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // quadrature spot-checks on the first form of the lowest and highest weight
    let mut spot_rel = 0.0f64;
    let ends = [forms.first(), forms.iter().rev().find(|f| f.index() == 0)];
    for f in ends.into_iter().flatten() {
        let spectral = pairs
            .iter()
            .find(|p| p.k == f.weight() && p.index == 0)
            .map(|p| p.value)
            .unwrap_or(0.0);
        let geometric = mixed_moment_geometric(f, g)?;
        let rel = (geometric - spectral).abs() / spectral.abs();
        if !(rel < SPOT_TOL) {
            return Err(Error::Anomaly(format!(
                "k={}: spectral mixed moment {spectral} disagrees with quadrature {geometric}",
                f.weight()
            )));
        }
        spot_rel = spot_rel.max(rel);
    }
    Ok(MixedScan {
        pairs,
        empty,
        spot_rel,
    })
}

fn base_record(name: &str, big_k: u32, g: &HeckeEigenform, scan: &MixedScan) -> ExperimentRecord {
    let mut r = ExperimentRecord::new(name)
        .param("K", big_k)
        .param("l", g.weight())
        .param("g", g.index());
    r.note("pairs", scan.pairs.len());
    if !scan.empty.is_empty() {
        let ks: Vec<String> = scan.empty.iter().map(u32::to_string).collect();
        r.note("empty_weights", ks.join(" "));
    }
    r.note_f64("spot_check_rel", scan.spot_rel);
    r
}

/// (1/K^2) sum over K < k <= 2K and f in H_k of |<|F|^2, |G|^2>/vol - 1|^2.
pub fn variance_stat(big_k: u32, g: &HeckeEigenform) -> Result<ExperimentRecord> {
    let scan = mixed_scan(big_k, g)?;
    let mut r = base_record("variance", big_k, g, &scan);
    let norm = (big_k as f64).powi(2);
    let rel = scan.spot_rel.max(SPECTRAL_REL);
    for p in &scan.pairs {
        let dev = p.value - 1.0;
        r.push_term(format!("k={} f={}", p.k, p.index), dev * dev / norm);
        r.error += 2.0 * dev.abs() * p.value.abs() * rel / norm;
    }
    r.value = r.term_sum();
    r.note_f64(
        "envelope_ratio",
        r.value / ((g.weight() as f64).powf(4.0 / 3.0) / big_k as f64),
    );
    r.check()?;
    Ok(r)
}

/// (2/K) sum over even K < k <= 2K of the average over H_k of the mixed moment; empty S_k add nothing.
pub fn expectation_stat(big_k: u32, g: &HeckeEigenform) -> Result<ExperimentRecord> {
    let scan = mixed_scan(big_k, g)?;
    let mut r = base_record("expectation", big_k, g, &scan);
    let rel = scan.spot_rel.max(SPECTRAL_REL);
    let scale = 2.0 / big_k as f64;
    let mut weights: Vec<u32> = scan.pairs.iter().map(|p| p.k).collect();
    weights.dedup();
    for &k in &weights {
        let here: Vec<&PairMoment> = scan.pairs.iter().filter(|p| p.k == k).collect();
        for p in &here {
            let share = scale / here.len() as f64;
            r.push_term(format!("k={} f={}", p.k, p.index), share * p.value);
            r.error += share * p.value.abs() * rel;
        }
    }
    r.value = r.term_sum();
    r.note_f64("deviation", r.value - 1.0);
    r.note_f64(
        "envelope_ratio",
        (r.value - 1.0).abs() / ((g.weight() as f64).powf(2.0 / 3.0) / (big_k as f64).sqrt()),
    );
    r.check()?;
    Ok(r)
}

/// L(1/2, f x g x h) for every h in H_{k+l}, by inverting the Parseval display termwise:
/// |<FG, H>|^2/(pi/3)^2 (k+l-1)/(2 pi^2) L(1, sym^2 h) 2 L(1, sym^2 f) L(1, sym^2 g)/zeta(2).
pub fn triple_lvalues(
    f: &HeckeEigenform,
    g: &HeckeEigenform,
) -> Result<Vec<(HeckeEigenform, f64)>> {
    let e = spectral_expansion(f, g)?;
    let kl = e.weight as f64;
    let outer = 2.0 * l_one_sym2(f)? * l_one_sym2(g)? / (PI * PI / 6.0);
    let terms = e.terms();
    e.forms
        .iter()
        .zip(terms)
        .map(|(h, t)| {
            // t = |<FG, H>|^2 / <H, H> / vol and <H, H> = vol
            let value = t * (kl - 1.0) / (2.0 * PI * PI) * l_one_sym2(h)? * outer;
            Ok((h.clone(), value))
        })
        .collect()
}

pub fn extract_triple_lvalue(
    f: &HeckeEigenform,
    g: &HeckeEigenform,
    h: &HeckeEigenform,
) -> Result<f64> {
    if h.weight() != f.weight() + g.weight() {
        return Err(Error::invalid(format!(
            "h has weight {}, expected {}",
            h.weight(),
            f.weight() + g.weight()
        )));
    }
    triple_lvalues(f, g)?
        .into_iter()
        .find(|(x, _)| x.index() == h.index())
        .map(|(_, v)| v)
        .ok_or_else(|| Error::invalid("h is not in the Hecke basis"))
}

/// The first-moment display: 2 pi^2/(k+l-1) sum_h L(1/2, f x g x h)/L(1, sym^2 h) against
/// 2 L(1, sym^2 f) L(1, sym^2 g)/zeta(2). The value is LHS/RHS, compared with the quadrature mixed moment.
pub fn first_moment_identity(f: &HeckeEigenform, g: &HeckeEigenform) -> Result<ExperimentRecord> {
    let vals = triple_lvalues(f, g)?;
    let kl = (f.weight() + g.weight()) as f64;
    let rhs = 2.0 * l_one_sym2(f)? * l_one_sym2(g)? / (PI * PI / 6.0);
    let mut r = ExperimentRecord::new("first_moment")
        .param("k", f.weight())
        .param("f", f.index())
        .param("l", g.weight())
        .param("g", g.index());
    for (h, v) in &vals {
        r.push_term(
            format!("h={}", h.index()),
            2.0 * PI * PI / (kl - 1.0) * v / l_one_sym2(h)? / rhs,
        );
    }
    r.value = r.term_sum();
    let geometric = mixed_moment_geometric(f, g)?;
    r.error = (r.value - geometric).abs();
    r.note_f64("rhs", rhs);
    r.note_f64("mixed_moment", geometric);
    r.check()?;
    Ok(r)
}

/// Threshold above which an extracted triple value counts as nonzero.
pub const NONZERO: f64 = 1e-10;

/// For each k, l in the grids and f in H_k, g in H_l: the largest extracted L(1/2, f x g x h)
/// over h in H_{k+l}, with the count of values above `NONZERO`.
pub fn nonvanishing_scan(k_grid: &[u32], ell_grid: &[u32]) -> Result<Vec<ExperimentRecord>> {
    let mut pairs = Vec::new();
    for &k in k_grid {
        for &l in ell_grid {
            if dim_cusp_space(k as i64)? == 0 || dim_cusp_space(l as i64)? == 0 {
                continue;
            }
            for f in hecke_basis(k)? {
                for g in hecke_basis(l)? {
                    pairs.push((f.clone(), g));
                }
            }
        }
    }
    pairs
        .par_iter()
        .map(|(f, g)| {
            let vals = triple_lvalues(f, g)?;
            let mut r = ExperimentRecord::new("nonvanishing")
                .param("k", f.weight())
                .param("f", f.index())
                .param("l", g.weight())
                .param("g", g.index());
            for (h, v) in &vals {
                r.push_term(format!("h={}", h.index()), *v);
            }
            r.value = vals
                .iter()
                .map(|(_, v)| *v)
                .fold(f64::NEG_INFINITY, f64::max);
            r.error = r.value.abs() * 1e-10;
            let nonzero = vals.iter().filter(|(_, v)| *v > NONZERO).count();
            r.note("nonzero", nonzero);
            r.note("forms", vals.len());
            r.check()?;
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests;
