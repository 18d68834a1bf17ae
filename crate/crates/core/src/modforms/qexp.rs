use rug::ops::Pow;
use rug::Integer;

use crate::error::{Error, Result};

/// Exact integer q-series of a level-one modular form, truncated after q^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    weight: u32,
    /// a(0..=N); a(0) is zero for cusp forms.
    coeffs: Vec<Integer>,
}

impl QExpansion {
    pub fn new(weight: u32, coeffs: Vec<Integer>) -> Result<Self> {
        if !weight.is_multiple_of(2) {
            return Err(Error::invalid(format!("weight {weight} is odd")));
        }
        if coeffs.is_empty() {
            return Err(Error::invalid("empty coefficient list"));
        }
        Ok(QExpansion { weight, coeffs })
    }

    /// Weight-0 constant series 1 + O(q^{N+1}).
    pub fn one(len: usize) -> Self {
        let mut coeffs = vec![Integer::new(); len + 1];
        coeffs[0] = Integer::from(1);
        QExpansion { weight: 0, coeffs }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Truncation length N (coefficients a(0..=N) are known).
    pub fn len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff(&self, n: usize) -> &Integer {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn is_cusp(&self) -> bool {
        self.coeffs[0] == 0
    }

    pub fn truncate(&self, len: usize) -> Self {
        let len = len.min(self.len());
        QExpansion {
            weight: self.weight,
            coeffs: self.coeffs[..=len].to_vec(),
        }
    }

    /// Product series, truncated to the shorter of the two lengths.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let len = self.len().min(other.len());
        let mut out = vec![Integer::new(); len + 1];
        for (i, a) in self.coeffs[..=len].iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs[..=len - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QExpansion {
            weight: self.weight + other.weight,
            coeffs: out,
        }
    }

    pub fn pow(&self, e: u32) -> QExpansion {
        let mut acc = QExpansion::one(self.len());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// self - c * other, requiring equal weights.
    pub fn sub_scaled(&self, c: &Integer, other: &QExpansion) -> QExpansion {
        debug_assert_eq!(self.weight, other.weight);
        let len = self.len().min(other.len());
        let coeffs = (0..=len)
            .map(|n| Integer::from(&self.coeffs[n] - c * &other.coeffs[n]))
            .collect();
        QExpansion {
            weight: self.weight,
            coeffs,
        }
    }

    pub fn scale(&self, c: &Integer) -> QExpansion {
        QExpansion {
            weight: self.weight,
            coeffs: self.coeffs.iter().map(|a| Integer::from(a * c)).collect(),
        }
    }
}

/// Divisor power sums sigma_r(n) for n in 0..=len (entry 0 unused).
pub fn sigma_table(r: u32, len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); len + 1];
    for d in 1..=len {
        let dr = Integer::from(d).pow(r);
        let mut m = d;
        while m <= len {
            out[m] += &dr;
            m += d;
        }
    }
    out
}

/// E_4 = 1 + 240 sum sigma_3(n) q^n.
pub fn eisenstein_e4(len: usize) -> QExpansion {
    let mut coeffs = sigma_table(3, len);
    coeffs[0] = Integer::from(1);
    for c in coeffs.iter_mut().skip(1) {
        *c *= 240;
    }
    QExpansion { weight: 4, coeffs }
}

/// E_6 = 1 - 504 sum sigma_5(n) q^n.
pub fn eisenstein_e6(len: usize) -> QExpansion {
    let mut coeffs = sigma_table(5, len);
    coeffs[0] = Integer::from(1);
    for c in coeffs.iter_mut().skip(1) {
        *c *= -504;
    }
    QExpansion { weight: 6, coeffs }
}

/// Delta = (E_4^3 - E_6^2) / 1728.
pub fn delta(len: usize) -> QExpansion {
    let e4 = eisenstein_e4(len);
    let e6 = eisenstein_e6(len);
    let num = e4.pow(3).sub_scaled(&Integer::from(1), &e6.pow(2));
    let coeffs = num
        .coeffs
        .into_iter()
        .map(|c| {
            let (q, r) = c.div_rem(Integer::from(1728));
            debug_assert_eq!(r, 0);
            q
        })
        .collect();
    QExpansion { weight: 12, coeffs }
}
