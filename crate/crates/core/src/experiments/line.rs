use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::special::quad::{gauss_legendre, Quadrature};

/// Nodes and weights of the composite Gauss-Legendre rule on [a, b].
pub(crate) fn gl_nodes(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            let rule = rule.clone();
            (0..order).map(move |i| (mid + 0.5 * h * rule.nodes[i], 0.5 * h * rule.weights[i]))
        })
        .collect()
}

/// Composite rule with the integrand evaluated in parallel and summed in node order.
pub(crate) fn integrate<F>(f: &F, a: f64, b: f64, panels: usize, order: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let nodes = gl_nodes(a, b, panels, order);
    let vals = nodes
        .par_iter()
        .map(|&(x, w)| f(x).map(|v| v * w))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.iter().sum())
}

/// Panel doubling from `start` until the relative change is below `rel_tol`.
pub(crate) fn integrate_doubling<F>(
    f: &F,
    a: f64,
    b: f64,
    start: usize,
    order: usize,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Quadrature<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let mut panels = start.max(1);
    let mut prev = integrate(f, a, b, panels, order)?;
    let mut evaluations = panels * order;
    while panels * 2 <= max_panels {
        panels *= 2;
        let cur = integrate(f, a, b, panels, order)?;
        evaluations += panels * order;
        let diff = (cur - prev).abs();
        if diff <= rel_tol * cur.abs() {
            return Ok(Quadrature {
                value: cur,
                error: diff,
                evaluations,
            });
        }
        prev = cur;
    }
    Err(Error::accuracy(format!(
        "integral on [{a}, {b}] not stable to {rel_tol:e} within {max_panels} panels"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_cosine() {
        let f = |x: f64| Ok(x.powi(5) - 2.0 * x);
        let v = integrate(&f, -1.0, 2.0, 3, 4).unwrap();
        assert!((v - (64.0 - 1.0) / 6.0 + 3.0).abs() < 1e-12);
        let g = |x: f64| Ok(x.cos());
        let q = integrate_doubling(&g, 0.0, 10.0, 1, 8, 1e-12, 64).unwrap();
        assert!((q.value - 10f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn doubling_gives_up() {
        let f = |x: f64| Ok((x - 0.3).abs().sqrt());
        assert!(integrate_doubling(&f, 0.0, 1.0, 1, 4, 1e-15, 8).is_err());
    }
}
