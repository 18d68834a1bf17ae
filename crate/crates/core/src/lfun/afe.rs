use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::kernel::{ContourKernel, PanelInterp, Smoothing};
use crate::arith::CoefficientStream;
use crate::error::{Error, Result};

type LogGamma = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// A value from a truncated smoothed sum, with its error estimate and the last n used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LValue<T> {
    pub value: T,
    pub error: f64,
    pub cutoff: usize,
}

/// Knobs for one AFE evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AfeOptions {
    pub smoothing: Smoothing,
    /// Contour abscissa Re s.
    pub eps: f64,
    /// Fixed truncation point; `None` picks it from the kernel decay.
    pub cutoff: Option<usize>,
    /// Relative kernel level at which the sum is truncated.
    pub threshold: f64,
}

impl Default for AfeOptions {
    fn default() -> Self {
        AfeOptions {
            smoothing: Smoothing::Unsmoothed,
            eps: 0.5,
            cutoff: None,
            threshold: 1e-12,
        }
    }
}

impl AfeOptions {
    /// exp(s^2) damping: the kernels as written, with much longer sums.
    pub fn gaussian() -> Self {
        AfeOptions {
            smoothing: Smoothing::Gaussian,
            ..Self::default()
        }
    }
}

/// Data for Lambda(s) = L_inf(s) Z(s) sum a(n) n^{-s} = root * Lambda(1 - s),
/// with Z(s) = zeta(2s) when `zeta_factor` is set and 1 otherwise.
pub struct AFEDescriptor {
    pub coefficients: Arc<CoefficientStream>,
    log_gamma: Box<LogGamma>,
    pub zeta_factor: bool,
    pub conductor_scale: f64,
    pub root_number: f64,
}

impl fmt::Debug for AFEDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AFEDescriptor")
            .field("coefficients", &self.coefficients)
            .field("zeta_factor", &self.zeta_factor)
            .field("conductor_scale", &self.conductor_scale)
            .field("root_number", &self.root_number)
            .finish()
    }
}

struct Side {
    center: Complex64,
    kernel: ContourKernel,
    factor: Complex64,
}

impl AFEDescriptor {
    /// `log_gamma(s)` is log L_inf(s).
    pub fn new(
        coefficients: Arc<CoefficientStream>,
        log_gamma: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
        zeta_factor: bool,
        conductor_scale: f64,
        root_number: f64,
    ) -> Result<Self> {
        if !(conductor_scale > 0.0) || !conductor_scale.is_finite() {
            return Err(Error::invalid("conductor scale must be positive"));
        }
        if root_number != 1.0 && root_number != -1.0 {
            return Err(Error::invalid("root number must be +1 or -1"));
        }
        Ok(AFEDescriptor {
            coefficients,
            log_gamma: Box::new(log_gamma),
            zeta_factor,
            conductor_scale,
            root_number,
        })
    }

    pub fn log_gamma_factor(&self, s: Complex64) -> Result<Complex64> {
        (self.log_gamma)(s)
    }

    /// L_inf(center + s) / L_inf(center).
    pub fn gamma_ratio(&self, center: Complex64, s: Complex64) -> Result<Complex64> {
        Ok((self.log_gamma_factor(center + s)? - self.log_gamma_factor(center)?).exp())
    }

    /// Contour abscissa for a kernel centred at `center`; the zeta(2 center + 2 s) pole stays left.
    fn abscissa(&self, center: Complex64, eps: f64) -> f64 {
        if self.zeta_factor && eps <= 0.5 - center.re {
            0.75 - center.re
        } else {
            eps
        }
    }

    /// The Mellin kernel V_center(y) of the sum attached to n^{-center}.
    pub fn kernel(
        &self,
        center: Complex64,
        opts: &AfeOptions,
        max_log_y: f64,
    ) -> Result<ContourKernel> {
        self.kernel_from(center, self.log_gamma_factor(center)?, opts, max_log_y)
    }

    /// Kernel with the gamma ratio taken against exp(lg0) instead of L_inf(center).
    fn kernel_from(
        &self,
        center: Complex64,
        lg0: Complex64,
        opts: &AfeOptions,
        max_log_y: f64,
    ) -> Result<ContourKernel> {
        let ratio =
            |s: Complex64| -> Result<Complex64> { Ok(self.log_gamma_factor(center + s)? - lg0) };
        let height = 4.0 * self.conductor_scale.ln().max(0.0);
        ContourKernel::build(
            &ratio,
            self.zeta_factor.then_some(center),
            opts.smoothing,
            self.abscissa(center, opts.eps),
            height,
            (0.0, max_log_y),
        )
    }

    /// L(s0) as sum a(n) n^{-s0} V_{s0}(n) + root * L_inf(1-s0)/L_inf(s0) * sum a(n) n^{s0-1} V_{1-s0}(n).
    pub fn evaluate(&self, s0: Complex64, opts: &AfeOptions) -> Result<LValue<Complex64>> {
        let reach = match opts.cutoff {
            Some(n) => (n.max(2) as f64).ln(),
            None => self.conductor_scale.ln().max(0.0) + 25.0,
        };
        let dual = Complex64::new(1.0, 0.0) - s0;
        // at a pole of L_inf(1 - s0) only the product of factor and kernel is finite
        let dual_anchor = match self.log_gamma_factor(dual) {
            Err(Error::Pole(_)) => self.log_gamma_factor(dual + self.abscissa(dual, opts.eps))?,
            other => other?,
        };
        let factor = (dual_anchor - self.log_gamma_factor(s0)?).exp() * self.root_number;
        let mut sides = vec![Side {
            center: s0,
            kernel: self.kernel(s0, opts, reach)?,
            factor: Complex64::new(1.0, 0.0),
        }];
        if (dual - s0).norm() < 1e-15 {
            sides[0].factor += factor;
        } else {
            sides.push(Side {
                center: dual,
                kernel: self.kernel_from(dual, dual_anchor, opts, reach)?,
                factor,
            });
        }

        let (cutoff, envelope_at_cut) = match opts.cutoff {
            Some(n) => {
                let x = (n as f64).ln();
                let env = sides
                    .iter()
                    .map(|sd| sd.factor.norm() * envelope(sd, x))
                    .sum();
                (n, env)
            }
            None => self.find_cutoff(&mut sides, opts)?,
        };
        let xmax = (cutoff as f64).ln();
        for sd in sides.iter_mut() {
            sd.kernel.calibrate(0.0, xmax);
        }
        let table = self.coefficients.table(cutoff)?;
        let a = &table[1..=cutoff];

        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        for sd in &sides {
            let (sum, err) = side_sum(sd, a, xmax);
            value += sd.factor * sum;
            error += sd.factor.norm() * err;
        }
        let tail_start = cutoff - cutoff / 10;
        let mean_abs = a[tail_start..].iter().map(|v| v.abs()).sum::<f64>()
            / (cutoff - tail_start).max(1) as f64;
        error += 4.0 * envelope_at_cut * mean_abs.max(1.0);
        Ok(LValue {
            value,
            error,
            cutoff,
        })
    }

    /// Smallest n past which every side's |V(y)| y^{1 - Re center} stays under threshold * peak,
    /// with the factor-weighted envelope there.
    fn find_cutoff(&self, sides: &mut [Side], opts: &AfeOptions) -> Result<(usize, f64)> {
        const STEP: f64 = 0.05;
        const QUIET: usize = 40;
        const MAX_X: f64 = 60.0;
        let mut worst = 0.0f64;
        let mut cut_x = 0.0f64;
        for sd in sides.iter() {
            let mut peak = 0.0f64;
            let mut below = 0usize;
            let mut last_above = 0.0;
            let mut x = 0.0;
            loop {
                let e = envelope(sd, x);
                peak = peak.max(e);
                if e < opts.threshold * peak {
                    below += 1;
                    if below >= QUIET {
                        break;
                    }
                } else {
                    below = 0;
                    last_above = x;
                }
                x += STEP;
                if x > MAX_X {
                    return Err(Error::accuracy(format!(
                        "kernel at centre {} has not decayed by log y = {MAX_X}",
                        sd.center
                    )));
                }
            }
            cut_x = cut_x.max(last_above + STEP);
            worst += sd.factor.norm() * opts.threshold * peak;
        }
        let cutoff = cut_x.exp().ceil().max(1.0) as usize;
        let x = (cutoff as f64).ln();
        let env = sides
            .iter()
            .map(|sd| sd.factor.norm() * envelope(sd, x))
            .sum::<f64>()
            .max(worst);
        Ok((cutoff, env))
    }
}

fn envelope(sd: &Side, x: f64) -> f64 {
    sd.kernel.eval_log(x).norm() * ((1.0 - sd.center.re) * x).exp()
}

const DIRECT_LIMIT: usize = 3000;

/// (sum a(n) n^{-c} V(n), error bound) for n = 1..=a.len().
fn side_sum(sd: &Side, a: &[f64], xmax: f64) -> (Complex64, f64) {
    let interp = (a.len() > DIRECT_LIMIT).then(|| {
        let f = |x: f64| sd.kernel.eval_log(x);
        PanelInterp::build(&f, 0.0, xmax.max(1e-3), 0.125)
    });
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (i, &c) in a.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let x = ((i + 1) as f64).ln();
        let w = (-sd.center * x).exp();
        let (v, e) = match &interp {
            Some(p) => (p.eval(x), p.error_at(x)),
            None => (sd.kernel.eval_log(x), 0.0),
        };
        sum += c * w * v;
        err += c.abs() * w.norm() * (e + sd.kernel.error_at(x) + 1e-16 * v.norm());
    }
    (sum, err)
}
