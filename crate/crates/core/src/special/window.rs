use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::quad::{adaptive, converge_panels, Quadrature};
use crate::error::{Error, Result};

type Shape = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Smooth compactly supported test function.
pub struct Window {
    lo: f64,
    hi: f64,
    shape: Shape,
    label: String,
    bounds: OnceLock<[f64; 5]>,
    hat_moment: OnceLock<std::result::Result<(f64, f64), String>>,
}

impl fmt::Debug for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Window({} on [{}, {}])", self.label, self.lo, self.hi)
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::bump(0.5, 3.0).expect("valid support")
    }
}

impl Window {
    /// exp(c - 1/(x-lo) - 1/(hi-x)), normalized to max 1 at the midpoint.
    pub fn bump(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::invalid(format!("bad window support [{lo}, {hi}]")));
        }
        let c = 4.0 / (hi - lo);
        let shape: Shape = Arc::new(move |x: f64| {
            if x <= lo || x >= hi {
                0.0
            } else {
                (c - 1.0 / (x - lo) - 1.0 / (hi - x)).exp()
            }
        });
        Ok(Window::with_shape(
            lo,
            hi,
            shape,
            format!("bump[{lo},{hi}]"),
        ))
    }

    /// A user-supplied shape; values outside the support are ignored.
    pub fn custom(
        lo: f64,
        hi: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: &str,
    ) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::invalid(format!("bad window support [{lo}, {hi}]")));
        }
        Ok(Window::with_shape(lo, hi, Arc::new(f), label.to_string()))
    }

    fn with_shape(lo: f64, hi: f64, shape: Shape, label: String) -> Self {
        Window {
            lo,
            hi,
            shape,
            label,
            bounds: OnceLock::new(),
            hat_moment: OnceLock::new(),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            0.0
        } else {
            (self.shape)(x)
        }
    }

    /// Observed max |W^(j)| for j = 0..=4 from finite differences on a fine grid.
    pub fn derivative_bounds(&self) -> [f64; 5] {
        *self.bounds.get_or_init(|| {
            let h = 2e-3;
            let n = 20_000;
            let step = (self.hi - self.lo) / n as f64;
            let mut out = [0.0f64; 5];
            for i in 0..=n {
                let x = self.lo + i as f64 * step;
                let v: Vec<f64> = (-2..=2).map(|j| self.evaluate(x + j as f64 * h)).collect();
                let d = [
                    v[2],
                    (v[3] - v[1]) / (2.0 * h),
                    (v[3] - 2.0 * v[2] + v[1]) / (h * h),
                    (v[4] - 2.0 * v[3] + 2.0 * v[1] - v[0]) / (2.0 * h.powi(3)),
                    (v[4] - 4.0 * v[3] + 6.0 * v[2] - 4.0 * v[1] + v[0]) / h.powi(4),
                ];
                for j in 0..5 {
                    out[j] = out[j].max(d[j].abs());
                }
            }
            out
        })
    }

    /// Fourier transform: integral of W(u) e(-uv) du.
    pub fn w_hat(&self, v: f64) -> Result<Quadrature<Complex64>> {
        let start = 8 + (v.abs() * (self.hi - self.lo)).ceil() as usize;
        converge_panels(
            |u| Complex64::from_polar(self.evaluate(u), -2.0 * PI * u * v),
            self.lo,
            self.hi,
            start,
            20,
            1e-14,
            1 << 18,
        )
        .map_err(|e| Error::accuracy(format!("w_hat({v}): {e}")))
    }

    /// integral over u > 0 of W(sqrt u) / sqrt(2 pi u) e^{iuv} du.
    pub fn w_breve(&self, v: f64) -> Result<Quadrature<Complex64>> {
        let (a, b) = (self.lo * self.lo, self.hi * self.hi);
        let start = 8 + ((b - a) * v.abs() / PI).ceil() as usize;
        converge_panels(
            |u| Complex64::from_polar(self.evaluate(u.sqrt()) / (2.0 * PI * u).sqrt(), u * v),
            a,
            b,
            start,
            20,
            1e-14,
            1 << 18,
        )
        .map_err(|e| Error::accuracy(format!("w_breve({v}): {e}")))
    }

    /// integral over the real line of v^4 |W_hat(v)| dv, with its error estimate.
    pub fn hat_fourth_moment(&self) -> Result<(f64, f64)> {
        self.hat_moment
            .get_or_init(|| self.compute_hat_moment().map_err(|e| e.to_string()))
            .clone()
            .map_err(Error::Accuracy)
    }

    fn compute_hat_moment(&self) -> Result<(f64, f64)> {
        // blocks of width 5 until |Ŵ| reaches the quadrature noise floor
        let block = 5.0;
        let floor = 1e-13;
        let mut total = 0.0;
        let mut err = 0.0;
        let mut start = 0.0;
        loop {
            let end: f64 = start + block;
            let mut failure = None;
            let q = adaptive(
                |v: f64| match self.w_hat(v) {
                    Ok(h) => v.powi(4) * h.value.norm(),
                    Err(e) => {
                        failure = Some(e);
                        0.0
                    }
                },
                start,
                end,
                (block * end.powi(4) * 1e-15).max(1e-10),
                1e-7,
                1000,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            total += q.value;
            err += q.error;
            start = end;
            if self.w_hat(end)?.value.norm() < floor || start >= 400.0 {
                err += block * end.powi(4) * floor;
                break;
            }
        }
        // Ŵ(-v) is the conjugate of Ŵ(v)
        Ok((2.0 * total, 2.0 * err))
    }
}

pub fn w_hat(w: &Window, v: f64) -> Result<Complex64> {
    Ok(w.w_hat(v)?.value)
}

pub fn w_breve(w: &Window, v: f64) -> Result<Complex64> {
    Ok(w.w_breve(v)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quad::adaptive;

    #[test]
    fn bump_shape() {
        let w = Window::default();
        assert_eq!(w.support(), (0.5, 3.0));
        assert!((w.evaluate(1.75) - 1.0).abs() < 1e-15);
        assert_eq!(w.evaluate(0.5), 0.0);
        assert_eq!(w.evaluate(3.2), 0.0);
        assert!(w.evaluate(0.51) > 0.0);
        let b = w.derivative_bounds();
        assert!((b[0] - 1.0).abs() < 1e-6);
        assert!(b.iter().all(|x| x.is_finite() && *x > 0.0));
    }

    #[test]
    fn transforms_at_zero() {
        let w = Window::default();
        let area = adaptive(|u| w.evaluate(u), 0.5, 3.0, 1e-14, 1e-14, 5000)
            .unwrap()
            .value;
        let h = w.w_hat(0.0).unwrap().value;
        assert!((h.re - area).abs() < 1e-12 && h.im.abs() < 1e-15);
        let direct = adaptive(
            |u: f64| w.evaluate(u.sqrt()) / (2.0 * PI * u).sqrt(),
            0.25,
            9.0,
            1e-14,
            1e-14,
            5000,
        )
        .unwrap()
        .value;
        let b = w.w_breve(0.0).unwrap().value;
        assert!((b.re - direct).abs() < 1e-12);
    }

    #[test]
    fn hat_decays() {
        let w = Window::default();
        let r = w.w_hat(20.0).unwrap().value.norm() / w.w_hat(10.0).unwrap().value.norm();
        assert!(r < 1.0 / 16.0, "ratio {r}");
        // (1+|v|)^6 |Ŵ(v)| stays bounded on a coarse grid
        let c = (0..=60)
            .map(|i| {
                let v = i as f64;
                (1.0 + v).powi(6) * w.w_hat(v).unwrap().value.norm()
            })
            .fold(0.0, f64::max);
        let tail = (1.0f64 + 60.0).powi(6) * w.w_hat(60.0).unwrap().value.norm();
        assert!(tail < c);
    }

    #[test]
    fn hat_is_conjugate_symmetric() {
        let w = Window::default();
        for v in [0.3, 2.0, 7.5] {
            let a = w.w_hat(v).unwrap().value;
            let b = w.w_hat(-v).unwrap().value;
            assert!((a - b.conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn breve_decays() {
        let w = Window::default();
        let small = w.w_breve(1.0).unwrap().value.norm();
        let big = w.w_breve(40.0).unwrap().value.norm();
        assert!(big < 1e-3 * small);
    }

    #[test]
    fn fourth_moment_is_finite() {
        let w = Window::default();
        let (m, e) = w.hat_fourth_moment().unwrap();
        assert!(m > 0.0 && m.is_finite());
        assert!(e < 1e-4 * m, "moment {m} error {e}");
    }
}
