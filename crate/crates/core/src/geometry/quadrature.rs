use std::f64::consts::PI;

use rayon::prelude::*;

use super::domain::UpperHalfPoint;
use super::eval::{arithmetic_norm, Series, MIN_HEIGHT, VOLUME};
use crate::error::{Error, Result};
use crate::modforms::{HeckeEigenform, QExpansion};
use crate::special::quad::{gauss_legendre, Quadrature};

const ORDER: usize = 20;
const REL_TOL: f64 = 1e-12;
const MAX_X_PANELS: usize = 64;

/// Gauss-Legendre panel counts on the truncated fundamental domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DomainMesh {
    pub x_panels: usize,
    pub y_panels: usize,
}

impl Default for DomainMesh {
    fn default() -> Self {
        DomainMesh {
            x_panels: 2,
            y_panels: 4,
        }
    }
}

impl DomainMesh {
    pub fn refined(self) -> Self {
        DomainMesh {
            x_panels: 2 * self.x_panels,
            y_panels: 2 * self.y_panels,
        }
    }
}

/// Height past which y^w e^{-4 pi y} times a 10^6 safety factor is below 1e-16 of its peak.
pub fn height_cutoff(weight: u32) -> f64 {
    let w = weight as f64;
    let log_env = |y: f64| w * y.ln() - 4.0 * PI * y;
    let peak_at = (w / (4.0 * PI)).max(MIN_HEIGHT);
    let target = log_env(peak_at) + (1e-16f64).ln() - (1e6f64).ln();
    let mut y = peak_at;
    while log_env(y) >= target {
        y += 0.05;
    }
    y
}

fn gl_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(ORDER);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * ORDER);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Integral of `density(z) dx dy / y^2` over |x| <= 1/2, sqrt(1 - x^2) <= y <= y_max,
/// for a density even in x.
pub fn integrate_on<F>(mesh: DomainMesh, y_max: f64, density: F) -> f64
where
    F: Fn(UpperHalfPoint) -> f64 + Sync,
{
    let columns: Vec<f64> = gl_nodes(0.0, 0.5, mesh.x_panels)
        .par_iter()
        .map(|&(x, wx)| {
            let floor = (1.0 - x * x).sqrt();
            let inner: f64 = gl_nodes(floor, y_max, mesh.y_panels)
                .iter()
                .map(|&(y, wy)| wy * density(UpperHalfPoint { x, y }) / (y * y))
                .sum();
            wx * inner
        })
        .collect();
    2.0 * columns.iter().sum::<f64>()
}

/// Doubles the mesh until two successive values agree to 1e-12 relative to
/// max(|value|, floor).
pub fn integrate_domain<F>(y_max: f64, floor: f64, density: F) -> Result<Quadrature<f64>>
where
    F: Fn(UpperHalfPoint) -> f64 + Sync,
{
    let mut mesh = DomainMesh::default();
    let mut prev = integrate_on(mesh, y_max, &density);
    let mut evaluations = mesh.x_panels * mesh.y_panels * ORDER * ORDER;
    loop {
        mesh = mesh.refined();
        if mesh.x_panels > MAX_X_PANELS {
            return Err(Error::accuracy(format!(
                "domain quadrature did not settle at {mesh:?}"
            )));
        }
        let cur = integrate_on(mesh, y_max, &density);
        evaluations += mesh.x_panels * mesh.y_panels * ORDER * ORDER;
        let change = (cur - prev).abs();
        if change <= REL_TOL * cur.abs().max(floor) {
            return Ok(Quadrature {
                value: cur,
                error: change,
                evaluations,
            });
        }
        prev = cur;
    }
}

/// <q, q>_k = integral of y^k |q(z)|^2 over the fundamental domain, by quadrature.
pub fn petersson_norm(q: &QExpansion) -> Result<f64> {
    petersson_norm_quad(q).map(|r| r.value)
}

pub fn petersson_norm_quad(q: &QExpansion) -> Result<Quadrature<f64>> {
    if !q.is_cusp() {
        return Err(Error::invalid("Petersson norm needs a cusp form"));
    }
    let series = Series::qexp(q, MIN_HEIGHT)?;
    integrate_domain(height_cutoff(q.weight()), 0.0, |z| {
        series.eval(z).norm_sqr()
    })
}

fn normalized(f: &HeckeEigenform) -> Result<Series> {
    Ok(Series::eigenform(
        f,
        (VOLUME / arithmetic_norm(f)?).sqrt(),
        MIN_HEIGHT,
    ))
}

/// Integral of |F_k|^2 for f rescaled to norm pi/3; equals pi/3 when normalization and quadrature agree.
pub fn eigenform_mass(f: &HeckeEigenform) -> Result<Quadrature<f64>> {
    let s = normalized(f)?;
    integrate_domain(height_cutoff(f.weight()), 0.0, |z| s.eval(z).norm_sqr())
}

/// <|F_k|^2, |G_l|^2> / vol by quadrature.
pub fn mixed_moment_geometric(f: &HeckeEigenform, g: &HeckeEigenform) -> Result<f64> {
    mixed_moment_quad(f, g, None).map(|r| r.value)
}

/// As `mixed_moment_geometric`, on a fixed mesh when one is given.
pub fn mixed_moment_quad(
    f: &HeckeEigenform,
    g: &HeckeEigenform,
    mesh: Option<DomainMesh>,
) -> Result<Quadrature<f64>> {
    let sf = normalized(f)?;
    let sg = if f.same(g) {
        sf.clone()
    } else {
        normalized(g)?
    };
    let y_max = height_cutoff(f.weight() + g.weight());
    let density = |z: UpperHalfPoint| sf.eval(z).norm_sqr() * sg.eval(z).norm_sqr();
    let q = match mesh {
        Some(m) => Quadrature {
            value: integrate_on(m, y_max, density),
            error: f64::NAN,
            evaluations: m.x_panels * m.y_panels * ORDER * ORDER,
        },
        None => integrate_domain(y_max, 0.0, density)?,
    };
    Ok(Quadrature {
        value: q.value / VOLUME,
        error: q.error / VOLUME,
        evaluations: q.evaluations,
    })
}

/// ||F_k||_4^4 / vol.
pub fn l4_norm(f: &HeckeEigenform) -> Result<f64> {
    mixed_moment_geometric(f, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::{delta, hecke_basis, miller_basis};
    use rug::Integer;

    #[test]
    fn unit_density_gives_volume() {
        let v = integrate_domain(40.0, 0.0, |_| 1.0).unwrap().value;
        // area of the domain truncated at y = 40 is pi/3 - 1/40
        assert!((v - (VOLUME - 1.0 / 40.0)).abs() < 1e-12, "{v}");
    }

    #[test]
    fn delta_norm() {
        let n = petersson_norm(&delta(64)).unwrap();
        assert!((n / 1.035_362_056_804_321e-6 - 1.0).abs() < 1e-10, "{n}");
    }

    #[test]
    fn norm_scales_quadratically() {
        let d = delta(64);
        let n = petersson_norm(&d).unwrap();
        let n3 = petersson_norm(&d.scale(&Integer::from(3))).unwrap();
        assert!((n3 / n - 9.0).abs() < 1e-10);
    }

    #[test]
    fn weight_24_eigenforms_are_orthogonal() {
        let h = hecke_basis(24).unwrap();
        let s: Vec<Series> = h.iter().map(|f| normalized(f).unwrap()).collect();
        let y_max = height_cutoff(24);
        let cross =
            integrate_domain(y_max, VOLUME, |z| (s[0].eval(z) * s[1].eval(z).conj()).re).unwrap();
        assert!(cross.value.abs() < 1e-8 * VOLUME, "{cross:?}");
        // the Miller basis elements are not orthogonal
        let b = miller_basis(24, 64).unwrap();
        let sb: Vec<Series> = b
            .iter()
            .map(|q| Series::qexp(q, MIN_HEIGHT).unwrap())
            .collect();
        let scale = petersson_norm(&b[0]).unwrap();
        let c =
            integrate_domain(y_max, scale, |z| (sb[0].eval(z) * sb[1].eval(z).conj()).re).unwrap();
        assert!(
            c.value.abs()
                > 1e-3
                    * petersson_norm(&b[0]).unwrap().sqrt()
                    * petersson_norm(&b[1]).unwrap().sqrt()
        );
    }

    #[test]
    fn mesh_refinement_is_stable() {
        let f = &hecke_basis(12).unwrap()[0];
        let coarse = mixed_moment_quad(
            f,
            f,
            Some(DomainMesh {
                x_panels: 4,
                y_panels: 8,
            }),
        )
        .unwrap()
        .value;
        let fine = mixed_moment_quad(
            f,
            f,
            Some(DomainMesh {
                x_panels: 8,
                y_panels: 16,
            }),
        )
        .unwrap()
        .value;
        assert!(((coarse - fine) / fine).abs() < 1e-8);
        assert!(fine > 0.0);
    }

    #[test]
    fn mass_is_volume() {
        let f = &hecke_basis(12).unwrap()[0];
        let m = eigenform_mass(f).unwrap();
        assert!((m.value - VOLUME).abs() < 1e-9, "{m:?}");
    }
}
