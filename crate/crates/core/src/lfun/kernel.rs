use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::special::quad::gauss_legendre;
use crate::special::zeta_line;

/// Test function G(s) in the Mellin integral; both choices are even in s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// G(s) = exp(s^2).
    Gaussian,
    /// G(s) = 1; the gamma factors alone give the decay.
    #[default]
    Unsmoothed,
}

impl Smoothing {
    fn log_weight(self, s: Complex64) -> Complex64 {
        match self {
            Smoothing::Gaussian => s * s,
            Smoothing::Unsmoothed => Complex64::new(0.0, 0.0),
        }
    }
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Smoothing::Gaussian => "gaussian",
            Smoothing::Unsmoothed => "unsmoothed",
        })
    }
}

impl FromStr for Smoothing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Smoothing::Gaussian),
            "unsmoothed" | "none" => Ok(Smoothing::Unsmoothed),
            other => Err(Error::invalid(format!("unknown smoothing {other:?}"))),
        }
    }
}

pub(crate) type LogRatio<'a> = &'a (dyn Fn(Complex64) -> Result<Complex64> + Sync);

const ORDER: usize = 20;
const MAX_NODES: usize = 1 << 17;
const MAX_HEIGHT: f64 = 5000.0;

/// V(y) = (1/2 pi i) int_{eps - iU}^{eps + iU} h(s) y^{-s} ds / s, stored as a node sum.
#[derive(Clone, Debug)]
pub struct ContourKernel {
    exponents: Vec<Complex64>,
    weights: Vec<Complex64>,
    eps: f64,
    height: f64,
    /// Bound on the discarded |Im s| > height part, at y = 1.
    tail: f64,
    /// Change between the last two panel refinements, rescaled to y = 1.
    quad_error: f64,
    /// The previous refinement, kept for recalibrating `quad_error`.
    coarse: Option<Box<ContourKernel>>,
}

impl ContourKernel {
    /// h(s) = exp(log_ratio(s)) * zeta(2 center + 2 s) (when present) * G(s).
    /// Panels double until the kernel is stable at log y in `xs`.
    pub(crate) fn build(
        log_ratio: LogRatio<'_>,
        zeta_center: Option<Complex64>,
        smoothing: Smoothing,
        eps: f64,
        height_hint: f64,
        xs: (f64, f64),
    ) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::invalid("contour abscissa must be positive"));
        }
        let h = |s: Complex64| -> Result<Complex64> {
            let mut v = (log_ratio(s)? + smoothing.log_weight(s)).exp();
            if let Some(c) = zeta_center {
                v *= zeta_line(2.0 * (c + s))?;
            }
            Ok(v / s)
        };
        let mag = |u: f64| h(Complex64::new(eps, u)).map(|v| v.norm());

        let mut height = height_hint.max(30.0);
        let peak = (0..=height as usize)
            .flat_map(|i| [i as f64, -(i as f64)])
            .map(mag)
            .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
        let floor = 1e-18 * peak;
        loop {
            let edge = mag(height)?.max(mag(-height)?);
            if edge <= floor || edge == 0.0 {
                break;
            }
            height *= 1.5;
            if height > MAX_HEIGHT {
                return Err(Error::accuracy(format!(
                    "contour integrand still {edge:e} at height {MAX_HEIGHT}"
                )));
            }
        }
        let tail = {
            let mut t = 0.0;
            for u in [height, -height] {
                let a = mag(u)?;
                let b = mag(u - u.signum())?;
                let rate = if a > 0.0 && b > a { (b / a).ln() } else { 1.0 };
                t += a / rate.min(1.0).max(1e-3);
            }
            t / (2.0 * PI)
        };

        let checks: Vec<f64> = (0..5)
            .map(|i| xs.0 + (xs.1 - xs.0) * i as f64 / 4.0)
            .collect();
        let mut panels = (2.0 * height).ceil() as usize;
        let mut prev: Option<(Vec<Complex64>, ContourKernel)> = None;
        loop {
            let k = Self::discretize(&h, eps, height, panels)?;
            let vals: Vec<Complex64> = checks.iter().map(|&x| k.eval_log(x)).collect();
            if let Some((pv, _)) = &prev {
                let scale = vals.iter().map(|v| v.norm()).fold(1.0, f64::max)
                    * (-eps * xs.0.min(0.0)).exp();
                let diff = vals
                    .iter()
                    .zip(pv)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                if diff < 1e-13 * scale {
                    // node-sum errors scale like y^{-eps}
                    let at_one = checks
                        .iter()
                        .zip(vals.iter().zip(pv))
                        .map(|(x, (a, b))| ((a - b).norm() + 1e-16 * a.norm()) * (eps * x).exp())
                        .fold(0.0, f64::max);
                    let (_, coarse) = prev.expect("checked above");
                    return Ok(ContourKernel {
                        tail,
                        quad_error: at_one,
                        coarse: Some(Box::new(coarse)),
                        ..k
                    });
                }
            }
            if k.exponents.len() * 2 > MAX_NODES {
                return Err(Error::accuracy(format!(
                    "contour quadrature not converged with {} nodes",
                    k.exponents.len()
                )));
            }
            prev = Some((vals, k));
            panels *= 2;
        }
    }

    fn discretize(
        h: &(dyn Fn(Complex64) -> Result<Complex64> + Sync),
        eps: f64,
        height: f64,
        panels: usize,
    ) -> Result<Self> {
        let rule = gauss_legendre(ORDER);
        let width = 2.0 * height / panels as f64;
        let us: Vec<(f64, f64)> = (0..panels)
            .flat_map(|p| {
                let mid = -height + (p as f64 + 0.5) * width;
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(move |(x, w)| (mid + 0.5 * width * x, 0.5 * width * w))
            })
            .collect();
        let pairs: Vec<(Complex64, Complex64)> = us
            .par_iter()
            .map(|&(u, w)| {
                let s = Complex64::new(eps, u);
                h(s).map(|v| (s, v * (w / (2.0 * PI))))
            })
            .collect::<Result<_>>()?;
        let (exponents, weights) = pairs
            .into_iter()
            .filter(|(_, w)| *w != Complex64::new(0.0, 0.0))
            .unzip();
        Ok(ContourKernel {
            exponents,
            weights,
            eps,
            height,
            tail: 0.0,
            quad_error: 0.0,
            coarse: None,
        })
    }

    /// V(e^x).
    pub fn eval_log(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, w) in self.exponents.iter().zip(&self.weights) {
            acc += w * (-s * x).exp();
        }
        acc
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        self.eval_log(y.ln())
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn nodes(&self) -> usize {
        self.exponents.len()
    }

    /// Re-measures the quadrature error against the previous refinement on [lo, hi] only.
    pub fn calibrate(&mut self, lo: f64, hi: f64) {
        let Some(coarse) = &self.coarse else { return };
        let eps = self.eps;
        self.quad_error = (0..=16)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / 16.0;
                let a = self.eval_log(x);
                ((a - coarse.eval_log(x)).norm() + 1e-16 * a.norm()) * (eps * x).exp()
            })
            .fold(0.0, f64::max);
    }

    /// Error bound for V(e^x): quadrature change plus contour tail.
    pub fn error_at(&self, x: f64) -> f64 {
        (self.quad_error + self.tail) * (-self.eps * x).exp()
    }
}

/// Piecewise Chebyshev interpolant of a complex function of x on [lo, hi].
pub(crate) struct PanelInterp {
    lo: f64,
    width: f64,
    coeffs: Vec<Vec<Complex64>>,
    errors: Vec<f64>,
}

const CHEB: usize = 32;

impl PanelInterp {
    pub fn build(f: &(dyn Fn(f64) -> Complex64 + Sync), lo: f64, hi: f64, width: f64) -> Self {
        let mut width = width;
        loop {
            let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
            let built: Vec<(Vec<Complex64>, f64)> = (0..panels)
                .into_par_iter()
                .map(|p| {
                    let a = lo + p as f64 * width;
                    let coeffs = cheb_fit(f, a, a + width);
                    // a point that is not a node
                    let probe = a + 0.3817 * width;
                    let err = (cheb_eval(&coeffs, a, a + width, probe) - f(probe)).norm();
                    (coeffs, err)
                })
                .collect();
            let scale = built
                .iter()
                .map(|(c, _)| c.iter().map(|v| v.norm()).sum::<f64>())
                .fold(1e-300, f64::max);
            let worst = built.iter().map(|b| b.1).fold(0.0, f64::max);
            if worst < 1e-13 * scale || width < 1e-3 {
                let (coeffs, errors) = built
                    .into_iter()
                    .map(|(c, e)| {
                        let floor = 1e-15 * c.iter().map(|v| v.norm()).sum::<f64>();
                        (c, 4.0 * e.max(floor))
                    })
                    .unzip();
                return PanelInterp {
                    lo,
                    width,
                    coeffs,
                    errors,
                };
            }
            width *= 0.5;
        }
    }

    fn panel(&self, x: f64) -> usize {
        (((x - self.lo) / self.width).max(0.0) as usize).min(self.coeffs.len() - 1)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let p = self.panel(x);
        let a = self.lo + p as f64 * self.width;
        cheb_eval(&self.coeffs[p], a, a + self.width, x)
    }

    /// Estimated interpolation error near x.
    pub fn error_at(&self, x: f64) -> f64 {
        self.errors[self.panel(x)]
    }
}

fn cheb_fit(f: &(dyn Fn(f64) -> Complex64 + Sync), a: f64, b: f64) -> Vec<Complex64> {
    let n = CHEB;
    let vals: Vec<Complex64> = (0..n)
        .map(|j| {
            let t = (PI * (j as f64 + 0.5) / n as f64).cos();
            f(0.5 * (a + b) + 0.5 * (b - a) * t)
        })
        .collect();
    (0..n)
        .map(|k| {
            let mut c = Complex64::new(0.0, 0.0);
            for (j, v) in vals.iter().enumerate() {
                c += v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
            }
            c * (if k == 0 { 1.0 } else { 2.0 } / n as f64)
        })
        .collect()
}

fn cheb_eval(c: &[Complex64], a: f64, b: f64, x: f64) -> Complex64 {
    let t = (2.0 * x - a - b) / (b - a);
    let (mut b1, mut b2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * t) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * t - b2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero(_: Complex64) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }

    #[test]
    fn gaussian_kernel_with_trivial_ratio() {
        // (1/2 pi i) int e^{s^2} y^{-s} ds/s = erfc(ln y / 2) / 2
        let k =
            ContourKernel::build(&zero, None, Smoothing::Gaussian, 0.5, 30.0, (-2.0, 6.0)).unwrap();
        for (x, want) in [
            (0.0, 0.5),
            (1.0, 0.5 * 0.479_500_122_186_953_5),
            (4.0, 0.5 * 0.004_677_734_981_047_266),
            (-2.0, 0.5 * 1.842_700_792_949_715),
        ] {
            let v = k.eval_log(x);
            assert!((v.re - want).abs() < 1e-13, "x={x}: {v}");
            assert!(v.im.abs() < 1e-13);
        }
    }

    #[test]
    fn interpolant_matches_kernel() {
        let k =
            ContourKernel::build(&zero, None, Smoothing::Gaussian, 0.5, 30.0, (0.0, 8.0)).unwrap();
        let f = |x: f64| k.eval_log(x);
        let p = PanelInterp::build(&f, 0.0, 8.0, 0.25);
        assert!(p.error_at(3.0) < 1e-13);
        for i in 0..97 {
            let x = 8.0 * i as f64 / 96.0;
            assert!((p.eval(x) - k.eval_log(x)).norm() < 1e-13);
        }
    }

    #[test]
    fn smoothing_round_trips() {
        for s in [Smoothing::Gaussian, Smoothing::Unsmoothed] {
            assert_eq!(s.to_string().parse::<Smoothing>().unwrap(), s);
        }
        assert!("quartic".parse::<Smoothing>().is_err());
    }
}
