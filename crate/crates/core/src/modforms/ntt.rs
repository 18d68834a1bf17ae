//! Multimodular number-theoretic transforms for long q-expansions.
//!
//! Basis coefficients far beyond the exact schoolbook range are computed
//! modulo several word-size primes and recombined by the Chinese remainder
//! theorem against an a priori bound on their size.

use std::sync::OnceLock;

use rayon::prelude::*;
use rug::Integer;

use super::miller::{Cofactor, MillerData};
use crate::arith::numtheory::is_prime;

const MAX_LOG: u32 = 23;

/// Montgomery arithmetic modulo an odd prime below 2^62.
#[derive(Clone, Debug)]
pub struct Modulus {
    pub p: u64,
    np: u64,
    r2: u64,
    root: u64,
}

impl Modulus {
    fn new(p: u64) -> Self {
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r2 = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r2 as u128 * r2 as u128) % p as u128) as u64;
        let mut m = Modulus {
            p,
            np: inv.wrapping_neg(),
            r2,
            root: 0,
        };
        let cofactor = (p - 1) >> MAX_LOG;
        for a in 2u64.. {
            let w = m.pow_plain(a, cofactor);
            if m.pow_plain(w, 1 << (MAX_LOG - 1)) != 1 {
                m.root = w;
                break;
            }
        }
        m
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.np);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.redc(a as u128 * self.r2 as u128)
    }

    #[inline]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn pow_plain(&self, b: u64, mut e: u64) -> u64 {
        let p = self.p as u128;
        let mut r = 1u128;
        let mut b = b as u128 % p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r as u64
    }

    pub fn inv_plain(&self, a: u64) -> u64 {
        self.pow_plain(a, self.p - 2)
    }

    /// Reduces a (possibly negative) Integer to Montgomery form.
    pub fn reduce(&self, x: &Integer) -> u64 {
        let m = Integer::from(self.p);
        let v = Integer::from(x % &m);
        let v = if v < 0 { v + &m } else { v };
        self.to_mont(v.to_u64().expect("reduced residue fits"))
    }

    fn transform(&self, a: &mut [u64], inverse: bool) {
        let n = a.len();
        let log = n.trailing_zeros();
        assert!(log <= MAX_LOG);
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let base = self.pow_plain(self.root, 1 << (MAX_LOG - log));
        let base = if inverse { self.inv_plain(base) } else { base };
        let mut len = 2;
        while len <= n {
            let w_len = self.to_mont(self.pow_plain(base, (n / len) as u64));
            let half = len / 2;
            let mut tw = Vec::with_capacity(half);
            let mut w = self.to_mont(1);
            for _ in 0..half {
                tw.push(w);
                w = self.mul(w, w_len);
            }
            for chunk in a.chunks_mut(len) {
                let (lo, hi) = chunk.split_at_mut(half);
                for i in 0..half {
                    let u = lo[i];
                    let v = self.mul(hi[i], tw[i]);
                    lo[i] = self.add(u, v);
                    hi[i] = self.sub(u, v);
                }
            }
            len <<= 1;
        }
        if inverse {
            let ninv = self.to_mont(self.inv_plain(n as u64));
            for x in a.iter_mut() {
                *x = self.mul(*x, ninv);
            }
        }
    }

    /// Truncated product of two Montgomery-form series of equal length.
    pub fn series_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let len = a.len().min(b.len());
        let size = (2 * len).next_power_of_two();
        let mut fa = vec![0u64; size];
        let mut fb = vec![0u64; size];
        fa[..len].copy_from_slice(&a[..len]);
        fb[..len].copy_from_slice(&b[..len]);
        self.transform(&mut fa, false);
        self.transform(&mut fb, false);
        for (x, y) in fa.iter_mut().zip(fb.iter()) {
            *x = self.mul(*x, *y);
        }
        self.transform(&mut fa, true);
        fa.truncate(len);
        fa
    }
}

/// Word-size NTT-friendly primes p = c * 2^23 + 1 < 2^62, largest first.
pub fn moduli(count: usize) -> Vec<Modulus> {
    static CACHE: OnceLock<Vec<u64>> = OnceLock::new();
    let primes = CACHE.get_or_init(|| {
        let mut out = Vec::new();
        let mut c = ((1u64 << 62) - 1) >> MAX_LOG;
        while out.len() < 64 {
            let p = (c << MAX_LOG) + 1;
            if is_prime(p) {
                out.push(p);
            }
            c -= 1;
        }
        out
    });
    assert!(count <= primes.len(), "too many moduli requested");
    primes[..count].iter().map(|&p| Modulus::new(p)).collect()
}

/// Residues of every Miller basis element at the requested indices, for one modulus.
fn basis_residues(
    m: &Modulus,
    data: &MillerData,
    len: usize,
    at: &[usize],
    s3: &[u128],
    s5: &[u128],
) -> Vec<Vec<u64>> {
    let n = len + 1;
    let one = m.to_mont(1);
    let red = |x: u128| m.to_mont((x % m.p as u128) as u64);
    let mut e4 = vec![0u64; n];
    let mut e6 = vec![0u64; n];
    e4[0] = one;
    e6[0] = one;
    let c240 = m.to_mont(240);
    let c504 = m.to_mont(504);
    for i in 1..n {
        e4[i] = m.mul(c240, red(s3[i]));
        e6[i] = m.sub(0, m.mul(c504, red(s5[i])));
    }
    let e4sq = m.series_mul(&e4, &e4);
    let e4cu = m.series_mul(&e4sq, &e4);
    let e6sq = m.series_mul(&e6, &e6);
    let inv1728 = m.to_mont(m.inv_plain(1728));
    let delta: Vec<u64> = (0..n)
        .map(|i| m.mul(m.sub(e4cu[i], e6sq[i]), inv1728))
        .collect();
    let (cof, d) = Cofactor::for_weight(data.weight);
    let mut a = match cof.e4_power() {
        0 => {
            let mut v = vec![0u64; n];
            v[0] = one;
            v
        }
        1 => e4.clone(),
        _ => e4sq.clone(),
    };
    if cof.has_e6() {
        a = m.series_mul(&a, &e6);
    }
    // delta_pow[j] = Delta^j, e6_pow[j] = E6^{2j}
    let mut delta_pow = vec![delta.clone()];
    for _ in 1..d {
        let next = m.series_mul(delta_pow.last().unwrap(), &delta);
        delta_pow.push(next);
    }
    let mut e6_pow: Vec<Vec<u64>> = vec![];
    for j in 1..d {
        let next = if j == 1 {
            e6sq.clone()
        } else {
            m.series_mul(e6_pow.last().unwrap(), &e6sq)
        };
        e6_pow.push(next);
    }
    let gens: Vec<Vec<u64>> = (1..=d)
        .map(|j| {
            let mut g = delta_pow[j - 1].clone();
            if d - j > 0 {
                g = m.series_mul(&g, &e6_pow[d - j - 1]);
            }
            if cof != Cofactor::One {
                g = m.series_mul(&g, &a);
            }
            g
        })
        .collect();
    let t: Vec<Vec<u64>> = data
        .transform
        .iter()
        .map(|row| row.iter().map(|x| m.reduce(x)).collect())
        .collect();
    (0..d)
        .map(|i| {
            at.iter()
                .map(|&idx| {
                    let mut acc = 0u64;
                    for j in 0..d {
                        acc = m.add(acc, m.mul(t[i][j], gens[j][idx]));
                    }
                    m.from_mont(acc)
                })
                .collect()
        })
        .collect()
}

/// Exact basis coefficients b_i(n) for n in `at` (all ≤ len), given that
/// every |b_i(n)| is below 2^(bound_bits).
pub fn basis_coefficients_at(
    data: &MillerData,
    len: usize,
    at: &[usize],
    bound_bits: u64,
) -> Vec<Vec<Integer>> {
    let count = ((bound_bits + 2) as f64 / 61.0).ceil() as usize;
    let mods = moduli(count.max(1));
    let mut s3 = vec![0u128; len + 1];
    let mut s5 = vec![0u128; len + 1];
    for dd in 1..=len {
        let d3 = (dd as u128).pow(3);
        let d5 = (dd as u128).pow(5);
        let mut m = dd;
        while m <= len {
            s3[m] += d3;
            s5[m] += d5;
            m += dd;
        }
    }
    let residues: Vec<Vec<Vec<u64>>> = mods
        .par_iter()
        .map(|m| basis_residues(m, data, len, at, &s3, &s5))
        .collect();
    let d = data.basis.len();
    let mut modulus = Integer::from(1);
    for m in &mods {
        modulus *= m.p;
    }
    let half = Integer::from(&modulus >> 1);
    (0..d)
        .map(|i| {
            (0..at.len())
                .map(|idx| {
                    let r: Vec<u64> = residues.iter().map(|per| per[i][idx]).collect();
                    let x = garner(&mods, &r);
                    if x > half {
                        x - &modulus
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect()
}

fn garner(mods: &[Modulus], r: &[u64]) -> Integer {
    let k = mods.len();
    let mut digits = vec![0u64; k];
    for i in 0..k {
        let p = mods[i].p as u128;
        // x_i = (r_i - (d_0 + d_1 p_0 + ...)) / (p_0 ... p_{i-1}) mod p_i
        let mut acc: u128 = 0;
        let mut prod: u128 = 1;
        for j in 0..i {
            acc = (acc + digits[j] as u128 * prod) % p;
            prod = prod * (mods[j].p as u128 % p) % p;
        }
        let diff = (r[i] as u128 + p - acc) % p;
        let inv = mods[i].inv_plain(prod as u64) as u128;
        digits[i] = (diff * inv % p) as u64;
    }
    let mut x = Integer::new();
    for i in (0..k).rev() {
        x *= mods[i].p;
        x += digits[i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::miller::miller_data;

    #[test]
    fn series_mul_matches_schoolbook() {
        let m = &moduli(1)[0];
        let a: Vec<u64> = (0..37u64).map(|i| m.to_mont(i * i + 3)).collect();
        let b: Vec<u64> = (0..37u64).map(|i| m.to_mont(7 * i + 1)).collect();
        let c = m.series_mul(&a, &b);
        for n in 0..37usize {
            let mut s: u128 = 0;
            for i in 0..=n {
                s += ((i * i + 3) as u128) * ((7 * (n - i) + 1) as u128);
            }
            assert_eq!(m.from_mont(c[n]) as u128, s % m.p as u128);
        }
    }

    #[test]
    fn garner_roundtrip() {
        let mods = moduli(3);
        let x = Integer::from(Integer::u_pow_u(3, 100)) - 12345;
        let r: Vec<u64> = mods
            .iter()
            .map(|m| Integer::from(&x % m.p).to_u64().unwrap())
            .collect();
        assert_eq!(garner(&mods, &r), x);
    }

    #[test]
    fn multimodular_matches_exact_expansion() {
        for k in [12u32, 26, 36, 50] {
            let len = 120;
            let data = miller_data(k, len).unwrap();
            let at: Vec<usize> = (1..=len).collect();
            let got = basis_coefficients_at(&data, len, &at, 600);
            for (i, b) in data.basis.iter().enumerate() {
                for (idx, &n) in at.iter().enumerate() {
                    assert_eq!(got[i][idx], *b.coeff(n), "k={k} i={i} n={n}");
                }
            }
        }
    }
}
