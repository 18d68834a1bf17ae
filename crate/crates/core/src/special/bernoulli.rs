use std::sync::OnceLock;

use rug::{Integer, Rational};

/// Bernoulli numbers B_0..=B_n (B_1 = -1/2 convention).
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::from(1));
    for m in 1..=n {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (j, bj) in b.iter().enumerate().take(m) {
            acc += Rational::from(bj * &binom);
            binom *= (m + 1 - j) as u32;
            binom /= (j + 1) as u32;
        }
        b.push(-acc / Rational::from(m as u32 + 1));
    }
    b
}

/// B_{2j} as f64 for j = 0..=40.
pub fn even_bernoulli_f64() -> &'static [f64] {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let b = bernoulli_numbers(80);
        (0..=40).map(|j| b[2 * j].to_f64()).collect()
    })
}

/// B_{2j} / (2j)! as f64 for j = 0..=40.
pub fn scaled_even_bernoulli() -> &'static [f64] {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let b = bernoulli_numbers(80);
        let mut fact = Integer::from(1);
        let mut out = Vec::new();
        for j in 0..=40usize {
            if j > 0 {
                fact *= (2 * j - 1) as u32;
                fact *= (2 * j) as u32;
            }
            out.push(Rational::from(&b[2 * j] / &fact).to_f64());
        }
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], Rational::from((-1, 2)));
        assert_eq!(b[2], Rational::from((1, 6)));
        assert_eq!(b[4], Rational::from((-1, 30)));
        assert_eq!(b[3], 0);
        assert_eq!(b[12], Rational::from((-691, 2730)));
    }
}
