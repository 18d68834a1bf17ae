use std::f64::consts::PI;

use super::numtheory::{gcd, mod_inverse};
use crate::error::{Error, Result};

/// S(m, n; c) by direct enumeration over the units modulo c.
pub fn kloosterman(m: i64, n: i64, c: u64) -> Result<f64> {
    if c == 0 {
        return Err(Error::invalid("Kloosterman modulus must be positive"));
    }
    if c == 1 {
        return Ok(1.0);
    }
    let ci = c as i64;
    let (mr, nr) = (m.rem_euclid(ci) as i128, n.rem_euclid(ci) as i128);
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for d in 1..c {
        if gcd(d, c) != 1 {
            continue;
        }
        let dbar = mod_inverse(d as i64, ci).expect("unit has an inverse") as i128;
        // exact residue keeps the angle in [0, 2 pi)
        let r = (mr * d as i128 + nr * dbar).rem_euclid(ci as i128) as f64;
        let theta = 2.0 * PI * r / c as f64;
        re += theta.cos();
        im += theta.sin();
    }
    let tol = 1e-12 * (c as f64).max(1.0);
    if im.abs() > tol {
        return Err(Error::Anomaly(format!(
            "S({m},{n};{c}) has imaginary part {im:e} above {tol:e}"
        )));
    }
    Ok(re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::numtheory::divisor_count;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(kloosterman(1, 1, 1).unwrap(), 1.0);
        assert!((kloosterman(1, 1, 3).unwrap() + 1.0).abs() < 1e-14);
        // Ramanujan sum: S(0, n; c) = c_c(n); S(0,0;c) = phi(c)
        assert!((kloosterman(0, 0, 12).unwrap() - 4.0).abs() < 1e-12);
        assert!((kloosterman(0, 1, 7).unwrap() + 1.0).abs() < 1e-12);
        assert!(kloosterman(1, 1, 0).is_err());
    }

    #[test]
    fn weil_bound() {
        for c in 1..=500u64 {
            for m in 1..=20i64 {
                for n in (1..=20i64).step_by(3) {
                    let s = kloosterman(m, n, c).unwrap();
                    let g = gcd(gcd(m as u64, n as u64), c) as f64;
                    let bound = divisor_count(c) as f64 * (c as f64).sqrt() * g.sqrt();
                    assert!(s.abs() <= bound + 1e-9, "S({m},{n};{c}) = {s} > {bound}");
                }
            }
        }
    }

    #[test]
    fn twisted_multiplicativity() {
        for c1 in 1..=20u64 {
            for c2 in 1..=20u64 {
                if c1 * c2 > 200 || gcd(c1, c2) != 1 {
                    continue;
                }
                let i1 = mod_inverse(c1 as i64, c2 as i64).unwrap();
                let i2 = mod_inverse(c2 as i64, c1 as i64).unwrap();
                for (m, n) in [(1i64, 1i64), (2, 5), (3, 7), (6, 4)] {
                    let lhs = kloosterman(m, n, c1 * c2).unwrap();
                    let rhs = kloosterman(m * i2 * i2, n, c1).unwrap()
                        * kloosterman(m * i1 * i1, n, c2).unwrap();
                    assert!((lhs - rhs).abs() < 1e-9, "c1={c1} c2={c2} m={m} n={n}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn symmetric_in_m_n(m in -50i64..50, n in -50i64..50, c in 1u64..300) {
            let a = kloosterman(m, n, c).unwrap();
            let b = kloosterman(n, m, c).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
