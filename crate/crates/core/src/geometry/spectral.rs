use rug::{Assign, Float, Integer};

use super::eval::{arithmetic_norm, VOLUME};
use crate::error::{Error, Result};
use crate::modforms::{hecke_basis, HeckeEigenform};

const PREC: u32 = 256;

/// f g = sum over h in H_{k+l} of c_h h, all three arithmetically normalized.
#[derive(Clone, Debug)]
pub struct SpectralExpansion {
    pub weight: u32,
    pub forms: Vec<HeckeEigenform>,
    pub coeffs: Vec<f64>,
    /// <h, h> for the arithmetically normalized h.
    pub norms: Vec<f64>,
    /// (pi/3)^2 / (<f, f> <g, g>), the rescaling of |fg|^2 to the normalized F, G.
    pub scale: f64,
}

impl SpectralExpansion {
    /// <F G, H> with F, G, H all rescaled to norm pi/3.
    pub fn inner(&self, j: usize) -> f64 {
        self.scale.sqrt() * self.coeffs[j] * (self.norms[j] * VOLUME).sqrt()
    }

    /// |<F G, H>|^2 / <H, H> / vol for each h; these sum to the mixed moment.
    pub fn terms(&self) -> Vec<f64> {
        (0..self.forms.len())
            .map(|j| self.scale * self.coeffs[j] * self.coeffs[j] * self.norms[j] / VOLUME)
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.terms().iter().sum()
    }
}

/// Echelon coordinates a(1..=dim) of f g in S_{k+l}. The Miller basis is reduced, so these
/// are the first dim coefficients of the product; the basis products are exact integers.
fn product_coords(f: &HeckeEigenform, g: &HeckeEigenform, dim: usize) -> Result<Vec<Float>> {
    let (bf, bg) = (&f.space().miller().basis, &g.space().miller().basis);
    if bf[0].len() < dim || bg[0].len() < dim {
        return Err(Error::invalid(format!(
            "basis expansions of length {} and {} cannot resolve dim S_{} = {dim}",
            bf[0].len(),
            bg[0].len(),
            f.weight() + g.weight()
        )));
    }
    let mut out = vec![Float::with_val(PREC, 0); dim];
    let mut prod = vec![Integer::new(); dim + 1];
    for (p, cp) in bf.iter().zip(f.coords()) {
        for (q, cq) in bg.iter().zip(g.coords()) {
            for slot in prod.iter_mut() {
                slot.assign(0);
            }
            for i in 1..dim {
                if *p.coeff(i) == 0 {
                    continue;
                }
                for j in 1..=dim - i {
                    prod[i + j] += Integer::from(p.coeff(i) * q.coeff(j));
                }
            }
            let w = Float::with_val(PREC, cp * cq);
            for m in 1..=dim {
                if prod[m] != 0 {
                    out[m - 1] += Float::with_val(PREC, &w * &prod[m]);
                }
            }
        }
    }
    Ok(out)
}

/// Solves sum_j c_j a_{h_j}(m) = v_m for m = 1..=dim by partial pivoting.
pub(crate) fn solve_coords(forms: &[HeckeEigenform], v: &[Float]) -> Result<Vec<f64>> {
    let d = forms.len();
    if v.len() != d {
        return Err(Error::invalid("coordinate vector does not match the basis"));
    }
    let mut a: Vec<Vec<Float>> = (0..d)
        .map(|m| {
            let mut row: Vec<Float> = forms
                .iter()
                .map(|h| Float::with_val(PREC, &h.coords()[m]))
                .collect();
            row.push(Float::with_val(PREC, &v[m]));
            row
        })
        .collect();
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| a[i][col].clone().abs().total_cmp(&a[j][col].clone().abs()))
            .expect("nonempty range");
        if a[pivot][col].is_zero() {
            return Err(Error::DegenerateSpectrum(
                "eigenform coordinate matrix is singular".into(),
            ));
        }
        a.swap(col, pivot);
        for r in col + 1..d {
            let factor = Float::with_val(PREC, &a[r][col] / &a[col][col]);
            for c in col..=d {
                let t = Float::with_val(PREC, &factor * &a[col][c]);
                a[r][c] -= t;
            }
        }
    }
    let mut x = vec![Float::with_val(PREC, 0); d];
    for r in (0..d).rev() {
        let mut acc = Float::with_val(PREC, &a[r][d]);
        for c in r + 1..d {
            acc -= Float::with_val(PREC, &a[r][c] * &x[c]);
        }
        x[r] = acc / &a[r][r];
    }
    Ok(x.iter().map(Float::to_f64).collect())
}

/// Expansion of f g in the Hecke basis of S_{k+l}.
pub fn spectral_expansion(f: &HeckeEigenform, g: &HeckeEigenform) -> Result<SpectralExpansion> {
    let weight = f.weight() + g.weight();
    let forms = hecke_basis(weight)?;
    let v = product_coords(f, g, forms.len())?;
    let coeffs = solve_coords(&forms, &v)?;
    let norms = forms
        .iter()
        .map(arithmetic_norm)
        .collect::<Result<Vec<_>>>()?;
    let scale = VOLUME * VOLUME / (arithmetic_norm(f)? * arithmetic_norm(g)?);
    Ok(SpectralExpansion {
        weight,
        forms,
        coeffs,
        norms,
        scale,
    })
}

/// sum_h |c_h|^2 <h, h> / vol after rescaling f, g to norm pi/3; equals the mixed moment.
pub fn parseval_spectral(f: &HeckeEigenform, g: &HeckeEigenform) -> Result<f64> {
    Ok(spectral_expansion(f, g)?.total())
}

/// <F G, H>_{k+l} with F, G, H rescaled to norm pi/3.
pub fn triple_inner(f: &HeckeEigenform, g: &HeckeEigenform, h: &HeckeEigenform) -> Result<f64> {
    if h.weight() != f.weight() + g.weight() {
        return Err(Error::invalid(format!(
            "h has weight {}, expected {} + {}",
            h.weight(),
            f.weight(),
            g.weight()
        )));
    }
    let e = spectral_expansion(f, g)?;
    let j = h.index();
    if j >= e.forms.len() {
        return Err(Error::invalid("h is not in the Hecke basis"));
    }
    Ok(e.inner(j))
}
