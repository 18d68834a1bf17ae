use std::f64::consts::PI;

use num_complex::Complex64;

use super::domain::{reduce_with_matrix, UpperHalfPoint};
use crate::error::{Error, Result};
use crate::lfun::l_one_sym2;
use crate::modforms::{HeckeEigenform, QExpansion};
use crate::special::ln_gamma_real;

/// vol(SL_2(Z) \ H).
pub const VOLUME: f64 = PI / 3.0;

/// Smallest height at which series are summed directly.
pub const MIN_HEIGHT: f64 = 0.866_025_403_784_438_6;

/// Relative size of the neglected q-series tail.
const TAIL_TARGET: f64 = 1e-20;

/// <f, f>_k for the arithmetically normalized eigenform (a_f(1) = 1), from
/// <f, f> = Gamma(k) L(1, sym^2 f) / (2^{2k-1} pi^{k+1}).
pub fn arithmetic_norm(f: &HeckeEigenform) -> Result<f64> {
    f.petersson_norm_or_init(|| {
        let k = f.weight() as f64;
        let log = ln_gamma_real(k) + l_one_sym2(f)?.ln()
            - (2.0 * k - 1.0) * 2f64.ln()
            - (k + 1.0) * PI.ln();
        Ok(log.exp())
    })
}

/// Bound on sum over n > terms of n^{(k+1)/2} e^{-2 pi n y}, relative to the n = 1 term.
/// The extra sqrt(n) covers |lambda(n)| <= d(n) <= 2 sqrt(n).
pub fn series_tail(k: u32, terms: usize, y: f64) -> f64 {
    let e = (k as f64 + 1.0) / 2.0;
    let log_term = |n: f64| e * n.ln() - 2.0 * PI * (n - 1.0) * y;
    let n0 = (terms + 1) as f64;
    // ratio of consecutive terms, decreasing in n
    let ratio = (e * (1.0 + 1.0 / n0).ln() - 2.0 * PI * y).exp();
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    2.0 * log_term(n0).exp() / (1.0 - ratio)
}

/// Number of terms needed at height >= y for a relative tail below `TAIL_TARGET`.
pub(crate) fn terms_for(k: u32, y: f64) -> usize {
    let mut n = 1usize;
    while series_tail(k, n, y) >= TAIL_TARGET {
        n += 1;
    }
    n
}

/// y^{k/2} sum_n s(n) n^{(k-1)/2} q^n, with s(n) stored per n.
#[derive(Clone, Debug)]
pub(crate) struct Series {
    pub weight: u32,
    /// scaled[n] = a(n) / n^{(k-1)/2}; index 0 unused.
    pub scaled: Vec<f64>,
}

impl Series {
    /// The eigenform times `scale`, enough terms for heights >= `y_min`.
    pub fn eigenform(f: &HeckeEigenform, scale: f64, y_min: f64) -> Self {
        let n = terms_for(f.weight(), y_min);
        let lam = f.lambdas(n);
        let mut scaled = vec![0.0; n + 1];
        for (m, s) in scaled.iter_mut().enumerate().skip(1) {
            *s = scale * lam[m];
        }
        Series {
            weight: f.weight(),
            scaled,
        }
    }

    pub fn qexp(q: &QExpansion, y_min: f64) -> Result<Self> {
        let k = q.weight();
        let n = terms_for(k, y_min);
        if q.len() < n {
            return Err(Error::accuracy(format!(
                "q-expansion of length {} too short, height {y_min} needs {n} terms",
                q.len()
            )));
        }
        let half = (k as f64 - 1.0) / 2.0;
        let mut scaled = vec![0.0; n + 1];
        for (m, s) in scaled.iter_mut().enumerate().skip(1) {
            *s = q.coeff(m).to_f64() / (m as f64).powf(half);
        }
        Ok(Series { weight: k, scaled })
    }

    pub fn eval(&self, z: UpperHalfPoint) -> Complex64 {
        let half = (self.weight as f64 - 1.0) / 2.0;
        let base = 0.5 * self.weight as f64 * z.y.ln();
        let step = Complex64::from_polar(1.0, 2.0 * PI * z.x);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, s) in self.scaled.iter().enumerate().skip(1) {
            phase *= step;
            if *s == 0.0 {
                continue;
            }
            let nf = n as f64;
            acc += phase * (*s * (base + half * nf.ln() - 2.0 * PI * nf * z.y).exp());
        }
        acc
    }
}

/// F_k(z) = y^{k/2} f(z) with the tail bound of the truncated q-series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormValue {
    pub value: Complex64,
    pub tail: f64,
    pub terms: usize,
}

/// F_k(z) for f rescaled to <f, f> = pi/3. Points below the domain are reduced first,
/// using F(z) = F(g z) (|cz+d| / (cz+d))^k.
pub fn eval_form(f: &HeckeEigenform, z: UpperHalfPoint) -> Result<FormValue> {
    let scale = (VOLUME / arithmetic_norm(f)?).sqrt();
    let (w, phase) = if z.y >= MIN_HEIGHT {
        (z, Complex64::new(1.0, 0.0))
    } else {
        let (w, g, _) = reduce_with_matrix(z)?;
        let j = g.automorphy(z);
        (w, (j.norm() / j).powu(f.weight()))
    };
    let series = Series::eigenform(f, scale, w.y.min(MIN_HEIGHT));
    let k = f.weight();
    let terms = series.scaled.len() - 1;
    let lead = scale * (0.5 * k as f64 * w.y.ln() - 2.0 * PI * w.y).exp();
    Ok(FormValue {
        value: series.eval(w) * phase,
        tail: lead * series_tail(k, terms, w.y),
        terms,
    })
}
