use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Slack allowed on |z| >= 1 for a reduced point.
pub const REDUCED_TOL: f64 = 1e-14;

/// A point x + iy of the upper half plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl fmt::Display for UpperHalfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.x, self.y)
    }
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
            return Err(Error::invalid(format!(
                "{x} + {y}i is not in the upper half plane"
            )));
        }
        Ok(UpperHalfPoint { x, y })
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// In the standard fundamental domain |x| <= 1/2, |z| >= 1.
    pub fn is_reduced(&self) -> bool {
        self.x.abs() <= 0.5 && self.x * self.x + self.y * self.y >= 1.0 - REDUCED_TOL
    }
}

/// An element [[a, b], [c, d]] of SL_2(Z).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sl2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Sl2 {
    pub const IDENTITY: Sl2 = Sl2 {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };
    pub const S: Sl2 = Sl2 {
        a: 0,
        b: -1,
        c: 1,
        d: 0,
    };

    pub fn t(n: i64) -> Sl2 {
        Sl2 {
            a: 1,
            b: n,
            c: 0,
            d: 1,
        }
    }

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::invalid(format!(
                "[[{a}, {b}], [{c}, {d}]] has determinant {}",
                a * d - b * c
            )));
        }
        Ok(Sl2 { a, b, c, d })
    }

    /// self * other.
    pub fn compose(&self, o: &Sl2) -> Sl2 {
        Sl2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// c z + d.
    pub fn automorphy(&self, z: UpperHalfPoint) -> Complex64 {
        Complex64::new(self.c as f64 * z.x + self.d as f64, self.c as f64 * z.y)
    }

    pub fn act(&self, z: UpperHalfPoint) -> UpperHalfPoint {
        let w = z.to_complex();
        let v = (self.a as f64 * w + self.b as f64) / self.automorphy(z);
        // the imaginary part in closed form avoids cancellation
        UpperHalfPoint {
            x: v.re,
            y: z.y / self.automorphy(z).norm_sqr(),
        }
    }
}

/// The reduced representative, the matrix g with g z = reduced, and the number of
/// generator steps (each S and each unit translation counts once).
pub fn reduce_with_matrix(z: UpperHalfPoint) -> Result<(UpperHalfPoint, Sl2, usize)> {
    if !(z.y > 0.0) || !z.y.is_finite() || !z.x.is_finite() {
        return Err(Error::invalid(format!(
            "{z} is not in the upper half plane"
        )));
    }
    let mut w = z;
    let mut g = Sl2::IDENTITY;
    let mut steps = 0usize;
    for _ in 0..10_000 {
        let n = w.x.round();
        if n != 0.0 && w.x.abs() > 0.5 {
            let t = Sl2::t(-(n as i64));
            w = UpperHalfPoint { x: w.x - n, y: w.y };
            g = t.compose(&g);
            steps += n.abs() as usize;
        }
        if w.x * w.x + w.y * w.y < 1.0 - REDUCED_TOL {
            w = Sl2::S.act(w);
            g = Sl2::S.compose(&g);
            steps += 1;
        } else {
            return Ok((w, g, steps));
        }
    }
    Err(Error::accuracy(format!(
        "reduction of {z} did not terminate"
    )))
}

/// Gamma-equivalent point in the standard fundamental domain and the word length used.
pub fn reduce(z: UpperHalfPoint) -> Result<(UpperHalfPoint, usize)> {
    reduce_with_matrix(z).map(|(w, _, n)| (w, n))
}
