use std::f64::consts::PI;

use rayon::prelude::*;

use crate::arith::kloosterman;
use crate::arith::numtheory::{divisor_count, gcd};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::lfun::l_one_sym2;
use crate::modforms::{dim_cusp_space, hecke_basis};
use crate::special::ln_gamma_real;

/// Default truncation aims for a tail bound below this.
pub const TAIL_TARGET: f64 = 1e-15;
const MAX_C: u64 = 1 << 20;

/// One evaluation of both sides of the Petersson formula.
#[derive(Clone, Debug, PartialEq)]
pub struct PeterssonReport {
    pub k: u32,
    pub m: u64,
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub c_max: u64,
    pub tail_bound: f64,
    pub residual: f64,
}

impl PeterssonReport {
    pub const CSV_HEADER: [&'static str; 7] =
        ["k", "m", "n", "lhs", "rhs", "residual", "tail_bound"];

    /// residual <= tail_bound + tol.
    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= self.tail_bound + tol
    }

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.m.to_string(),
            self.n.to_string(),
            fmt_f64(self.lhs),
            fmt_f64(self.rhs),
            fmt_f64(self.residual),
            fmt_f64(self.tail_bound),
        ]
    }
}

fn check_args(k: u32, m: u64, n: u64) -> Result<()> {
    if !k.is_multiple_of(2) {
        return Err(Error::invalid(format!("weight {k} must be even")));
    }
    if m == 0 || n == 0 {
        return Err(Error::invalid("m and n must be positive"));
    }
    Ok(())
}

/// 12 zeta(2)/(k-1) sum over H_k of lambda_f(m) lambda_f(n) / L(1, sym^2 f).
pub fn petersson_lhs(k: u32, m: u64, n: u64) -> Result<f64> {
    check_args(k, m, n)?;
    if dim_cusp_space(k as i64)? == 0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for f in hecke_basis(k)? {
        acc += f.hecke_eigenvalue(m) * f.hecke_eigenvalue(n) / l_one_sym2(&f)?;
    }
    Ok(2.0 * PI * PI / (k as f64 - 1.0) * acc)
}

/// log of 2 pi tau(c) sqrt(gcd(m, n, c)) c^{-1/2} (2 pi sqrt(mn) / c)^{k-1} / (k-1)!.
fn log_term_bound(k: u32, m: u64, n: u64, c: u64) -> f64 {
    let nu = k as f64 - 1.0;
    let g = gcd(gcd(m, n), c) as f64;
    let cf = c as f64;
    (2.0 * PI * divisor_count(c) as f64 * g.sqrt()).ln() - 0.5 * cf.ln()
        + nu * (2.0 * PI * ((m * n) as f64).sqrt() / cf).ln()
        - ln_gamma_real(nu + 1.0)
}

/// Bound on the c-sum beyond c_max, from |J_v(x)| <= (x/2)^v / v! and the Weil bound.
pub fn tail_bound(k: u32, m: u64, n: u64, c_max: u64) -> f64 {
    let split = 2 * c_max.max(1);
    let mut total: f64 = (c_max + 1..=split)
        .map(|c| log_term_bound(k, m, n, c).exp())
        .sum();
    // beyond the split: tau(c) <= 2 sqrt(c), then compare with an integral
    let nu = k as f64 - 1.0;
    let g = gcd(m, n) as f64;
    let lead = (4.0 * PI * g.sqrt()).ln() + nu * (2.0 * PI * ((m * n) as f64).sqrt()).ln()
        - ln_gamma_real(nu + 1.0);
    let s = split as f64;
    total += (lead - (nu - 1.0) * s.ln() - (nu - 1.0).ln()).exp();
    total
}

/// Smallest c_max whose tail bound falls below `TAIL_TARGET`.
pub fn default_c_max(k: u32, m: u64, n: u64) -> Result<u64> {
    check_args(k, m, n)?;
    if k < 4 {
        return Err(Error::invalid("the tail bound needs k >= 4"));
    }
    let mut hi = 1u64;
    while tail_bound(k, m, n, hi) >= TAIL_TARGET {
        hi *= 2;
        if hi > MAX_C {
            return Err(Error::accuracy(format!(
                "no c_max up to {MAX_C} reaches the tail target for k={k}"
            )));
        }
    }
    // tail bound is decreasing in c_max, and fails at hi / 2
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if tail_bound(k, m, n, mid) < TAIL_TARGET {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// delta(m,n) + 2 pi i^{-k} sum_{c <= c_max} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c), with the tail bound.
pub fn petersson_rhs(k: u32, m: u64, n: u64, c_max: u64) -> Result<(f64, f64)> {
    check_args(k, m, n)?;
    if c_max == 0 {
        return Err(Error::invalid("c_max must be at least 1"));
    }
    let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let x = 4.0 * PI * ((m * n) as f64).sqrt();
    let mut sum = 0.0;
    for c in 1..=c_max {
        let s = kloosterman(m as i64, n as i64, c)?;
        if s != 0.0 {
            sum += s / c as f64 * crate::special::bessel_j(k - 1, x / c as f64)?;
        }
    }
    let delta = if m == n { 1.0 } else { 0.0 };
    Ok((delta + 2.0 * PI * sign * sum, tail_bound(k, m, n, c_max)))
}

/// Both sides at (k, m, n); `c_max` defaults to `default_c_max`.
pub fn petersson_report(k: u32, m: u64, n: u64, c_max: Option<u64>) -> Result<PeterssonReport> {
    let c_max = match c_max {
        Some(c) => c,
        None => default_c_max(k, m, n)?,
    };
    let lhs = petersson_lhs(k, m, n)?;
    let (rhs, tail_bound) = petersson_rhs(k, m, n, c_max)?;
    Ok(PeterssonReport {
        k,
        m,
        n,
        lhs,
        rhs,
        c_max,
        tail_bound,
        residual: (lhs - rhs).abs(),
    })
}

/// Reports for every weight in `weights` and 1 <= m, n <= mn_max, in (k, m, n) order.
pub fn petersson_grid(weights: &[u32], mn_max: u64) -> Result<Vec<PeterssonReport>> {
    for &k in weights {
        if dim_cusp_space(k as i64)? == 0 {
            continue;
        }
        for f in hecke_basis(k)? {
            l_one_sym2(&f)?;
        }
    }
    let cells: Vec<(u32, u64, u64)> = weights
        .iter()
        .flat_map(|&k| (1..=mn_max).flat_map(move |m| (1..=mn_max).map(move |n| (k, m, n))))
        .collect();
    cells
        .par_iter()
        .map(|&(k, m, n)| petersson_report(k, m, n, None))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_j;

    #[test]
    fn delta_weight_single_term() {
        let f = &hecke_basis(12).unwrap()[0];
        let want = 12.0 * (PI * PI / 6.0) / 11.0 / l_one_sym2(f).unwrap();
        assert!((petersson_lhs(12, 1, 1).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_assembly() {
        let h = hecke_basis(24).unwrap();
        let mut want = 0.0;
        for f in &h {
            want += f.lambda_direct(2).unwrap() / l_one_sym2(f).unwrap();
        }
        want *= 2.0 * PI * PI / 23.0;
        let got = petersson_lhs(24, 1, 2).unwrap();
        assert!((got - want).abs() < 1e-12 * want.abs().max(1.0));
        assert!((petersson_lhs(24, 2, 1).unwrap() - got).abs() < 1e-15);
    }

    #[test]
    fn tail_bound_against_direct_terms() {
        // the first omitted term alone is about 2e-10, so no valid bound can be tiny here
        let (k, m, n) = (12, 1, 1);
        let first = 2.0 * PI * kloosterman(1, 1, 11).unwrap().abs() / 11.0
            * bessel_j(11, 4.0 * PI / 11.0).unwrap();
        let bound = tail_bound(k, m, n, 10);
        assert!(bound >= first, "{bound} vs {first}");
        assert!(bound < 1e-8);
        // oracle: explicit Weil/Taylor terms to c = 10^5 plus a crude integral remainder
        let mut oracle = 0.0;
        for c in 11..=100_000u64 {
            let taylor = (2.0 * PI / c as f64).powi(11) / 39_916_800.0;
            oracle += 2.0 * PI * divisor_count(c) as f64 / (c as f64).sqrt() * taylor;
        }
        assert!(bound >= oracle);
        assert!(bound < 1.5 * oracle);
    }

    #[test]
    fn default_c_max_is_minimal() {
        for (k, m, n) in [(12, 1, 1), (12, 10, 10), (30, 7, 3)] {
            let c = default_c_max(k, m, n).unwrap();
            assert!(tail_bound(k, m, n, c) < TAIL_TARGET);
            assert!(c == 1 || tail_bound(k, m, n, c - 1) >= TAIL_TARGET);
        }
    }

    #[test]
    fn off_diagonal_path() {
        let r = petersson_report(12, 1, 2, None).unwrap();
        assert!(r.passes(1e-8), "{r:?}");
        // Delta: lambda(2) = -24 / 2^{11/2}
        let lam2 = -24.0 / 2f64.powf(5.5);
        assert!((r.lhs / petersson_lhs(12, 1, 1).unwrap() - lam2).abs() < 1e-12);
    }

    #[test]
    fn small_grid_passes() {
        for r in petersson_grid(&[12, 16, 22], 4).unwrap() {
            assert!(r.passes(1e-8), "{r:?}");
        }
    }

    #[test]
    fn empty_weight_has_vanishing_rhs() {
        for (m, n) in [(1, 1), (2, 3), (5, 5)] {
            let r = petersson_report(14, m, n, None).unwrap();
            assert_eq!(r.lhs, 0.0);
            assert!(r.passes(1e-8), "{r:?}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(petersson_rhs(13, 1, 1, 5).is_err());
        assert!(petersson_rhs(12, 0, 1, 5).is_err());
        assert!(petersson_rhs(12, 1, 1, 0).is_err());
    }
}
