use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::miller::{miller_data, MillerData};
use super::ntt::basis_coefficients_at;
use crate::arith::numtheory::{multiplicative_table, primes_up_to};
use crate::error::{Error, Result};

/// Working precision floor for the eigen-decomposition, in bits.
pub const MIN_PRECISION: u32 = 128;
/// Relative separation below which two T_2 eigenvalues count as clustered.
pub const SEPARATION_TOL: f64 = 1e-20;

pub fn default_truncation(dim: usize) -> usize {
    64usize.max(2 * dim + 16)
}

/// One cusp space S_k with its exact basis and eigen-decomposition.
#[derive(Debug)]
pub struct CuspSpace {
    weight: u32,
    data: MillerData,
    prec: u32,
    /// a_f(1..=d) for every eigenform, sorted by a_f(2).
    coords: Vec<Vec<Float>>,
    /// Bound on sum_f |coordinate of basis_i along f| over i, for CRT sizing.
    spread: f64,
    /// basis_i(p) at primes beyond the exact range, keyed by table length.
    prime_cache: Mutex<BTreeMap<usize, Arc<PrimeCoefficients>>>,
}

#[derive(Debug)]
struct PrimeCoefficients {
    primes: Vec<u64>,
    values: Vec<Vec<Integer>>,
}

impl CuspSpace {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.data.basis.len()
    }

    pub fn exact_len(&self) -> usize {
        self.data.basis[0].len()
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn miller(&self) -> &MillerData {
        &self.data
    }

    fn prime_coefficients(&self, len: usize) -> Arc<PrimeCoefficients> {
        let mut cache = self.prime_cache.lock().expect("prime cache poisoned");
        if let Some((_, v)) = cache.range(len..).next() {
            return v.clone();
        }
        let exact = self.exact_len();
        let primes: Vec<u64> = primes_up_to(len)
            .into_iter()
            .filter(|&p| p as usize > exact)
            .collect();
        let at: Vec<usize> = primes.iter().map(|&p| p as usize).collect();
        let half_weight = (self.weight as f64 - 1.0) / 2.0;
        let bits = (2.0 * self.spread.max(1.0)).log2() + half_weight * (len as f64).log2() + 8.0;
        let values = basis_coefficients_at(&self.data, len, &at, bits.ceil() as u64);
        let entry = Arc::new(PrimeCoefficients { primes, values });
        cache.insert(len, entry.clone());
        entry
    }
}

struct EigenInner {
    space: Arc<CuspSpace>,
    index: usize,
    /// lambda(n) for n <= exact_len, straight from the q-expansion.
    direct: Vec<f64>,
    table: RwLock<Arc<Vec<f64>>>,
    petersson_norm: OnceLock<f64>,
    l1_sym2: OnceLock<f64>,
}

/// A Hecke eigenform in S_k, arithmetically normalized (a(1) = 1).
///
/// Cloning is cheap; clones share the eigenvalue table and cached invariants.
#[derive(Clone)]
pub struct HeckeEigenform(Arc<EigenInner>);

impl std::fmt::Debug for HeckeEigenform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeckeEigenform")
            .field("weight", &self.weight())
            .field("index", &self.index())
            .field("lambda2", &self.0.direct.get(2))
            .finish()
    }
}

impl HeckeEigenform {
    pub fn weight(&self) -> u32 {
        self.0.space.weight
    }

    /// Position within H_k (ascending lambda(2)).
    pub fn index(&self) -> usize {
        self.0.index
    }

    pub fn space(&self) -> &Arc<CuspSpace> {
        &self.0.space
    }

    /// a_f(1..=d), the coordinates of f in the echelon basis.
    pub fn coords(&self) -> &[Float] {
        &self.0.space.coords[self.0.index]
    }

    /// Arithmetic coefficients a_f(1..=n) at working precision.
    pub fn qexp_coeffs(&self, n: usize) -> Result<Vec<Float>> {
        let sp = &self.0.space;
        if n > sp.exact_len() {
            return Err(Error::DataExhausted {
                what: format!("q-expansion of weight {}", sp.weight),
                needed: n as u64,
                available: sp.exact_len() as u64,
            });
        }
        Ok(arithmetic_coeffs(&sp.data, self.coords(), sp.prec, n))
    }

    /// lambda(n) computed directly from the exact q-expansion, n <= exact length.
    pub fn lambda_direct(&self, n: usize) -> Option<f64> {
        self.0.direct.get(n).copied().filter(|_| n >= 1)
    }

    /// Table of lambda(0..=len) (entry 0 unused), extended on demand.
    pub fn lambdas(&self, len: usize) -> Arc<Vec<f64>> {
        {
            let t = self.0.table.read().expect("table poisoned");
            if t.len() > len {
                return t.clone();
            }
        }
        let mut t = self.0.table.write().expect("table poisoned");
        if t.len() > len {
            return t.clone();
        }
        let target = len.max(2 * (t.len() - 1)).next_power_of_two();
        *t = Arc::new(self.build_table(target));
        t.clone()
    }

    fn build_table(&self, len: usize) -> Vec<f64> {
        let sp = &self.0.space;
        let exact = sp.exact_len();
        let mut at_prime = vec![0.0f64; len + 1];
        for p in primes_up_to(len.min(exact)) {
            at_prime[p as usize] = self.0.direct[p as usize];
        }
        if len > exact {
            let pc = sp.prime_coefficients(len);
            let coords = self.coords();
            let prec = sp.prec + 64;
            let half = (sp.weight as f64 - 1.0) / 2.0;
            for (idx, &p) in pc.primes.iter().enumerate() {
                if p as usize > len {
                    break;
                }
                let mut acc = Float::with_val(prec, 0);
                for (i, c) in coords.iter().enumerate() {
                    acc += Float::with_val(prec, c * &pc.values[i][idx]);
                }
                let scale = Float::with_val(prec, p).pow(Float::with_val(prec, half));
                at_prime[p as usize] = (acc / scale).to_f64();
            }
        }
        multiplicative_table(len, |p, e| prime_power_from(at_prime[p as usize], e))
    }

    pub fn hecke_eigenvalue(&self, n: u64) -> f64 {
        self.lambdas(n as usize)[n as usize]
    }

    /// lambda(p^e) from lambda(p) by the three-term recursion.
    pub fn lambda_prime_power(&self, p: u64, e: u32) -> f64 {
        prime_power_from(self.hecke_eigenvalue(p), e)
    }

    pub fn cached_petersson_norm(&self) -> Option<f64> {
        self.0.petersson_norm.get().copied()
    }

    pub fn petersson_norm_or_init(&self, f: impl FnOnce() -> Result<f64>) -> Result<f64> {
        if let Some(v) = self.0.petersson_norm.get() {
            return Ok(*v);
        }
        let v = f()?;
        Ok(*self.0.petersson_norm.get_or_init(|| v))
    }

    pub fn cached_l1_sym2(&self) -> Option<f64> {
        self.0.l1_sym2.get().copied()
    }

    pub fn l1_sym2_or_init(&self, f: impl FnOnce() -> Result<f64>) -> Result<f64> {
        if let Some(v) = self.0.l1_sym2.get() {
            return Ok(*v);
        }
        let v = f()?;
        Ok(*self.0.l1_sym2.get_or_init(|| v))
    }

    /// Address of the shared state; stable while any handle is alive.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// True when both handles refer to the same eigenform object.
    pub fn same(&self, other: &HeckeEigenform) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

pub fn prime_power_from(lp: f64, e: u32) -> f64 {
    let (mut prev, mut cur) = (1.0, lp);
    if e == 0 {
        return 1.0;
    }
    for _ in 1..e {
        let next = lp * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn arithmetic_coeffs(data: &MillerData, coords: &[Float], prec: u32, n: usize) -> Vec<Float> {
    (1..=n)
        .map(|m| {
            let mut acc = Float::with_val(prec, 0);
            for (c, b) in coords.iter().zip(&data.basis) {
                acc += Float::with_val(prec, c * b.coeff(m));
            }
            acc
        })
        .collect()
}

/// Matrix of T_2 on the echelon basis: column i holds the first d coefficients of T_2 b_i.
pub fn t2_matrix(data: &MillerData) -> Vec<Vec<Integer>> {
    let d = data.basis.len();
    let pow = Integer::from(Integer::u_pow_u(2, data.weight - 1));
    let mut m = vec![vec![Integer::new(); d]; d];
    for (i, b) in data.basis.iter().enumerate() {
        for j in 1..=d {
            let mut v = b.coeff(2 * j).clone();
            if j % 2 == 0 {
                v += &pow * b.coeff(j / 2);
            }
            m[j - 1][i] = v;
        }
    }
    m
}

/// Characteristic polynomial det(xI - M), coefficients from constant term up.
pub fn char_poly(m: &[Vec<Integer>]) -> Vec<Integer> {
    let d = m.len();
    let mut c = vec![Integer::new(); d + 1];
    c[d] = Integer::from(1);
    let mut mk = vec![vec![Integer::new(); d]; d];
    for k in 1..=d {
        // mk <- M * mk + c[d-k+1] I
        let mut next = vec![vec![Integer::new(); d]; d];
        for i in 0..d {
            for j in 0..d {
                let mut s = Integer::new();
                for l in 0..d {
                    s += &m[i][l] * &mk[l][j];
                }
                if i == j {
                    s += &c[d - k + 1];
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let mut tr = Integer::new();
        for i in 0..d {
            for l in 0..d {
                tr += &m[i][l] * &mk[l][i];
            }
        }
        let (q, r) = tr.div_rem(Integer::from(k as u32));
        debug_assert_eq!(r, 0);
        c[d - k] = -q;
    }
    c
}

fn poly_eval(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in p.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r: Vec<Rational> = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db && !r.is_empty() {
        let lead = Rational::from(r.last().unwrap() / b.last().unwrap());
        let shift = r.len() - 1 - db;
        for (i, bc) in b.iter().enumerate() {
            let t = Rational::from(&lead * bc);
            r[shift + i] -= t;
        }
        r.pop();
        while r.last().is_some_and(|c| *c == 0) {
            r.pop();
        }
    }
    r
}

fn sturm_chain(p: &[Rational]) -> Vec<Vec<Rational>> {
    let deriv: Vec<Rational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| Rational::from(c * i as u32))
        .collect();
    let mut chain = vec![p.to_vec(), deriv];
    loop {
        let n = chain.len();
        if chain[n - 1].len() <= 1 {
            break;
        }
        let r = poly_rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes(chain: &[Vec<Rational>], x: &Rational) -> usize {
    let signs: Vec<i32> = chain
        .iter()
        .map(|p| poly_eval(p, x).cmp0() as i32)
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// All real roots of a square-free integer polynomial, sorted, to about `bits` bits.
pub fn real_roots(poly: &[Integer], bits: u32) -> Result<Vec<Float>> {
    let p: Vec<Rational> = poly.iter().map(Rational::from).collect();
    let chain = sturm_chain(&p);
    if chain.last().map_or(0, |c| c.len()) > 1 {
        return Err(Error::DegenerateSpectrum(
            "repeated eigenvalue of T_2".into(),
        ));
    }
    let lead = p.last().unwrap().clone().abs();
    let mut bound = Rational::from(1);
    for c in &p[..p.len() - 1] {
        let q = c.clone().abs() / &lead;
        if q > bound {
            bound = q;
        }
    }
    bound += 1;
    let degree = p.len() - 1;
    let mut isolated: Vec<(Rational, Rational)> = Vec::new();
    let mut stack = vec![(Rational::from(-&bound), bound.clone())];
    while let Some((a, b)) = stack.pop() {
        let n = sign_changes(&chain, &a) - sign_changes(&chain, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            isolated.push((a, b));
            continue;
        }
        let mid = Rational::from(&a + &b) / 2u32;
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    if isolated.len() != degree {
        return Err(Error::DegenerateSpectrum(format!(
            "expected {degree} real eigenvalues, found {}",
            isolated.len()
        )));
    }
    isolated.sort_by(|x, y| x.0.cmp(&y.0));
    let width_target = Rational::from((Integer::from(1), Integer::from(1) << (bits + 8))) * &bound;
    let mut out = Vec::with_capacity(degree);
    for (mut a, mut b) in isolated {
        let mut fa = poly_eval(&p, &a);
        if fa == 0 {
            out.push(Float::with_val(bits, &a));
            continue;
        }
        while Rational::from(&b - &a) > width_target {
            let mid = Rational::from(&a + &b) / 2u32;
            let fm = poly_eval(&p, &mid);
            if fm == 0 {
                a = mid.clone();
                b = mid;
                break;
            }
            if fm.cmp0() == fa.cmp0() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        out.push(Float::with_val(bits, Rational::from(&a + &b) / 2u32));
    }
    Ok(out)
}

/// Kernel vector of (M - lambda I) normalized to first entry 1.
fn eigenvector(m: &[Vec<Integer>], lambda: &Float, prec: u32) -> Vec<Float> {
    let d = m.len();
    if d == 1 {
        return vec![Float::with_val(prec, 1)];
    }
    // rows: sum_{c>=1} B[r][c] v_c = -B[r][0]
    let mut rows: Vec<Vec<Float>> = (0..d)
        .map(|r| {
            let mut row: Vec<Float> = (0..d)
                .map(|c| {
                    let mut v = Float::with_val(prec, &m[r][c]);
                    if r == c {
                        v -= lambda;
                    }
                    v
                })
                .collect();
            let first = row.remove(0);
            row.push(-first);
            row
        })
        .collect();
    let unknowns = d - 1;
    for col in 0..unknowns {
        let piv = (col..d)
            .max_by(|&a, &b| {
                rows[a][col]
                    .clone()
                    .abs()
                    .partial_cmp(&rows[b][col].clone().abs())
                    .unwrap()
            })
            .unwrap();
        rows.swap(col, piv);
        for r in (col + 1)..d {
            let f = Float::with_val(prec, &rows[r][col] / &rows[col][col]);
            for c in col..=unknowns {
                let t = Float::with_val(prec, &f * &rows[col][c]);
                rows[r][c] -= t;
            }
        }
    }
    let mut v = vec![Float::with_val(prec, 0); unknowns];
    for col in (0..unknowns).rev() {
        let mut s = rows[col][unknowns].clone();
        for c in (col + 1)..unknowns {
            s -= Float::with_val(prec, &rows[col][c] * &v[c]);
        }
        v[col] = s / &rows[col][col];
    }
    let mut out = vec![Float::with_val(prec, 1)];
    out.extend(v);
    out
}

/// Builds S_k with its Hecke eigenbasis from an exact expansion of length `len`.
pub fn cusp_space(k: u32, len: usize, precision: u32) -> Result<Arc<CuspSpace>> {
    if !k.is_multiple_of(2) {
        return Err(Error::invalid(format!("weight {k} is odd")));
    }
    let data = miller_data(k, len)?;
    let d = data.basis.len();
    if len < 2 * d + 2 {
        return Err(Error::invalid(format!(
            "truncation {len} too short to determine T_2 on S_{k} (need {})",
            2 * d + 2
        )));
    }
    let prec = precision.max(MIN_PRECISION);
    let work = prec + 64;
    let m = t2_matrix(&data);
    let cp = char_poly(&m);
    let roots = real_roots(&cp, work)?;
    for w in roots.windows(2) {
        let gap = Float::with_val(work, &w[1] - &w[0]);
        let scale = w[0].clone().abs().max(&w[1].clone().abs());
        if gap.to_f64() <= SEPARATION_TOL * scale.to_f64() {
            return Err(Error::DegenerateSpectrum(format!(
                "T_2 eigenvalues {} and {} closer than {SEPARATION_TOL:e} relative",
                w[0].to_f64(),
                w[1].to_f64()
            )));
        }
    }
    let coords: Vec<Vec<Float>> = roots
        .iter()
        .map(|r| {
            eigenvector(&m, r, work)
                .into_iter()
                .map(|x| Float::with_val(prec, x))
                .collect()
        })
        .collect();
    // coords matrix A (row f) maps basis to eigenforms; spread = max_i sum_f |A^{-1}_{i f}|
    let spread = inverse_spread(&coords, work);
    Ok(Arc::new(CuspSpace {
        weight: k,
        data,
        prec,
        coords,
        spread,
        prime_cache: Mutex::new(BTreeMap::new()),
    }))
}

fn inverse_spread(a: &[Vec<Float>], prec: u32) -> f64 {
    let d = a.len();
    // Gauss-Jordan on [A | I]
    let mut m: Vec<Vec<Float>> = (0..d)
        .map(|r| {
            let mut row: Vec<Float> = a[r].iter().map(|x| Float::with_val(prec, x)).collect();
            for c in 0..d {
                row.push(Float::with_val(prec, (r == c) as u32));
            }
            row
        })
        .collect();
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&x, &y| {
                m[x][col]
                    .clone()
                    .abs()
                    .partial_cmp(&m[y][col].clone().abs())
                    .unwrap()
            })
            .unwrap();
        m.swap(col, piv);
        let p = m[col][col].clone();
        for c in 0..2 * d {
            m[col][c] /= &p;
        }
        for r in 0..d {
            if r != col {
                let f = m[r][col].clone();
                for c in 0..2 * d {
                    let t = Float::with_val(prec, &f * &m[col][c]);
                    m[r][c] -= t;
                }
            }
        }
    }
    (0..d)
        .map(|i| (0..d).map(|f| m[i][d + f].to_f64().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// All of H_k, sorted by lambda(2) ascending.
pub fn eigenforms_of(space: &Arc<CuspSpace>) -> Vec<HeckeEigenform> {
    let n = space.exact_len();
    let half = (space.weight as f64 - 1.0) / 2.0;
    (0..space.dim())
        .map(|index| {
            let a = arithmetic_coeffs(&space.data, &space.coords[index], space.prec + 64, n);
            let mut direct = vec![0.0; n + 1];
            for (m, am) in a.iter().enumerate() {
                let nn = m + 1;
                let scale = Float::with_val(space.prec + 64, nn)
                    .pow(Float::with_val(space.prec + 64, half));
                direct[nn] = Float::with_val(space.prec + 64, am / &scale).to_f64();
            }
            let form = HeckeEigenform(Arc::new(EigenInner {
                space: space.clone(),
                index,
                direct,
                table: RwLock::new(Arc::new(vec![0.0])),
                petersson_norm: OnceLock::new(),
                l1_sym2: OnceLock::new(),
            }));
            let len = (n / 2).max(1);
            *form.0.table.write().unwrap() = Arc::new(form.build_table(len));
            form
        })
        .collect()
}

/// H_k from an exact expansion of length `len` at `precision` bits.
pub fn hecke_eigenforms(k: u32, len: usize, precision: u32) -> Result<Vec<HeckeEigenform>> {
    let space = cusp_space(k, len, precision)?;
    Ok(eigenforms_of(&space))
}

type BasisSlot = Arc<Mutex<Option<Vec<HeckeEigenform>>>>;

static WORKING_PRECISION: AtomicU32 = AtomicU32::new(160);

/// Precision in bits used by `hecke_basis` from now on (at least `MIN_PRECISION`).
pub fn set_working_precision(bits: u32) {
    WORKING_PRECISION.store(bits.max(MIN_PRECISION), Ordering::Relaxed);
}

pub fn working_precision() -> u32 {
    WORKING_PRECISION.load(Ordering::Relaxed)
}

/// H_k with the default truncation at the working precision, built once per weight and precision.
pub fn hecke_basis(k: u32) -> Result<Vec<HeckeEigenform>> {
    static CACHE: OnceLock<Mutex<BTreeMap<(u32, u32), BasisSlot>>> = OnceLock::new();
    let prec = working_precision();
    let d = super::miller::dim_cusp_space(k as i64)?;
    if d == 0 {
        return Err(Error::EmptySpace(k));
    }
    let slot = {
        let mut guard = CACHE
            .get_or_init(|| Mutex::new(BTreeMap::new()))
            .lock()
            .expect("basis cache poisoned");
        guard.entry((k, prec)).or_default().clone()
    };
    let mut entry = slot.lock().expect("basis slot poisoned");
    if let Some(forms) = entry.as_ref() {
        return Ok(forms.clone());
    }
    let forms = hecke_eigenforms(k, default_truncation(d), prec)?;
    *entry = Some(forms.clone());
    Ok(forms)
}
