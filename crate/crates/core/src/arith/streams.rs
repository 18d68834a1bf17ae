use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_complex::Complex64;

use super::numtheory::{divisors, gcd, is_prime, mobius, multiplicative_table, primes_up_to};
use crate::error::{Error, Result};
use crate::experiments::MaassFormData;
use crate::modforms::{prime_power_from, HeckeEigenform};

type Builder = dyn Fn(usize) -> Result<Vec<f64>> + Send + Sync;

/// Dirichlet coefficients a(1), a(2), ... of one L-function, memoized.
pub struct CoefficientStream {
    degree: u32,
    description: String,
    build: Box<Builder>,
    table: RwLock<Arc<Vec<f64>>>,
}

impl fmt::Debug for CoefficientStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CoefficientStream({}, degree {})",
            self.description, self.degree
        )
    }
}

impl CoefficientStream {
    /// `build(len)` must return a(0..=len) with a(1) = 1.
    pub fn new(
        degree: u32,
        description: impl Into<String>,
        build: impl Fn(usize) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        CoefficientStream {
            degree,
            description: description.into(),
            build: Box::new(build),
            table: RwLock::new(Arc::new(vec![0.0, 1.0])),
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// a(0..=len) or longer; entry 0 is unused.
    pub fn table(&self, len: usize) -> Result<Arc<Vec<f64>>> {
        {
            let t = self.table.read().expect("stream table poisoned");
            if t.len() > len {
                return Ok(t.clone());
            }
        }
        let mut t = self.table.write().expect("stream table poisoned");
        if t.len() > len {
            return Ok(t.clone());
        }
        let grown = len.max(2 * (t.len() - 1));
        let fresh = match (self.build)(grown) {
            Ok(v) => v,
            Err(_) if grown > len => (self.build)(len)?,
            Err(e) => return Err(e),
        };
        *t = Arc::new(fresh);
        Ok(t.clone())
    }

    pub fn coeff(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::invalid("Dirichlet coefficients start at n = 1"));
        }
        Ok(self.table(n as usize)?[n as usize])
    }
}

/// sum_{d^2 m = p^e} lambda(m^2), from lambda(p).
fn sym2_prime_power(lp: f64, e: u32) -> f64 {
    (0..=e / 2)
        .map(|j| prime_power_from(lp, 2 * e - 4 * j))
        .sum()
}

/// A(p^i, p^j) from the sym^2 prime-power values s[0..].
fn gl3_prime_power(s: &[f64], i: usize, j: usize) -> f64 {
    let mut v = s[i] * s[j];
    if i >= 1 && j >= 1 {
        v -= s[i - 1] * s[j - 1];
    }
    v
}

fn sym2_table(f: &HeckeEigenform, len: usize) -> Vec<f64> {
    let lam = f.lambdas(len);
    multiplicative_table(len, |p, e| sym2_prime_power(lam[p as usize], e))
}

type StreamCache = Mutex<HashMap<usize, (HeckeEigenform, Arc<CoefficientStream>)>>;

/// Symmetric-square coefficients sum_{d^2 m = n} lambda_f(m^2), shared per eigenform.
pub fn sym2_coeffs(f: &HeckeEigenform) -> Arc<CoefficientStream> {
    static CACHE: OnceLock<StreamCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("sym2 cache poisoned");
    let entry = guard.entry(f.id()).or_insert_with(|| {
        let g = f.clone();
        let stream = CoefficientStream::new(
            3,
            format!("sym2(f) k={} #{}", f.weight(), f.index()),
            move |len| Ok(sym2_table(&g, len)),
        );
        (f.clone(), Arc::new(stream))
    });
    entry.1.clone()
}

/// A(n, 1) = A(1, n) = sum_{a^2 b = n} lambda_f(b^2).
fn gl3_edge(f: &HeckeEigenform, n: u64) -> f64 {
    if n == 1 {
        return 1.0;
    }
    let lam = f.lambdas(n as usize);
    super::numtheory::factorize(n)
        .into_iter()
        .map(|(p, e)| sym2_prime_power(lam[p as usize], e))
        .product()
}

/// GL(3) Fourier coefficient A(m, n) of sym^2 f.
pub fn gl3_coeff(f: &HeckeEigenform, m: u64, n: u64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("A(m, n) needs m, n >= 1"));
    }
    let g = gcd(m, n);
    let mut acc = 0.0;
    for d in divisors(g) {
        let mu = mobius(d);
        if mu != 0 {
            acc += mu as f64 * gl3_edge(f, m / d) * gl3_edge(f, n / d);
        }
    }
    Ok(acc)
}

/// Rankin-Selberg coefficients sum_{m^2 n = N} A(m, n) lambda_phi(n).
pub fn rs_coeffs(f: &HeckeEigenform, phi: &MaassFormData) -> CoefficientStream {
    let g = f.clone();
    let phi = phi.clone();
    let label = format!(
        "sym2(f)xphi k={} #{} {}",
        f.weight(),
        f.index(),
        phi.label()
    );
    CoefficientStream::new(6, label, move |len| {
        let lp = phi.table(len)?;
        let lam = g.lambdas(len);
        let mut cache: HashMap<u64, Vec<f64>> = HashMap::new();
        let table = multiplicative_table(len, |p, e| {
            let s = cache.entry(p).or_insert_with(|| {
                let mut emax = 0;
                let mut q = 1usize;
                while q <= len / p as usize {
                    q *= p as usize;
                    emax += 1;
                }
                (0..=emax)
                    .map(|i| sym2_prime_power(lam[p as usize], i))
                    .collect()
            });
            let e = e as usize;
            (0..=e / 2)
                .map(|i| {
                    let j = e - 2 * i;
                    gl3_prime_power(s, i, j) * lp[(p as usize).pow(j as u32)]
                })
                .sum()
        });
        Ok(table)
    })
}

/// Satake parameter e^{i theta} with 2 cos theta = lambda_f(p), theta in [0, pi].
pub fn satake(f: &HeckeEigenform, p: u64) -> Result<Complex64> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    satake_from(f.hecke_eigenvalue(p), p)
}

pub(crate) fn satake_from(lp: f64, p: u64) -> Result<Complex64> {
    const TOL: f64 = 1e-10;
    if lp.abs() > 2.0 + TOL || !lp.is_finite() {
        return Err(Error::DeligneViolation { p, value: lp.abs() });
    }
    let theta = (0.5 * lp).clamp(-1.0, 1.0).acos();
    Ok(Complex64::from_polar(1.0, theta))
}

/// Degree-8 triple product coefficients from the Satake parameters of f, g, h.
pub fn triple_coeffs(
    f: &HeckeEigenform,
    g: &HeckeEigenform,
    h: &HeckeEigenform,
) -> CoefficientStream {
    let forms = [f.clone(), g.clone(), h.clone()];
    let label = format!(
        "f x g x h k=({},{},{}) #({},{},{})",
        f.weight(),
        g.weight(),
        h.weight(),
        f.index(),
        g.index(),
        h.index()
    );
    CoefficientStream::new(8, label, move |len| {
        let tables: Vec<_> = forms.iter().map(|x| x.lambdas(len)).collect();
        let mut local: HashMap<u64, Vec<f64>> = HashMap::new();
        for p in primes_up_to(len) {
            let alphas: Vec<Complex64> = tables
                .iter()
                .map(|t| satake_from(t[p as usize], p))
                .collect::<Result<_>>()?;
            let mut emax = 0usize;
            let mut q = 1usize;
            while q <= len / p as usize {
                q *= p as usize;
                emax += 1;
            }
            let mut series = vec![Complex64::new(0.0, 0.0); emax + 1];
            series[0] = Complex64::new(1.0, 0.0);
            for sa in [1i32, -1] {
                for sb in [1i32, -1] {
                    for sc in [1i32, -1] {
                        let v = alphas[0].powi(sa) * alphas[1].powi(sb) * alphas[2].powi(sc);
                        for e in 1..=emax {
                            let prev = series[e - 1];
                            series[e] += v * prev;
                        }
                    }
                }
            }
            let mut real = Vec::with_capacity(emax + 1);
            for (e, c) in series.iter().enumerate() {
                if c.im.abs() > 1e-10 * c.norm().max(1.0) {
                    return Err(Error::Anomaly(format!(
                        "triple coefficient at {p}^{e} has imaginary part {:e}",
                        c.im
                    )));
                }
                real.push(c.re);
            }
            local.insert(p, real);
        }
        Ok(multiplicative_table(len, |p, e| local[&p][e as usize]))
    })
}
