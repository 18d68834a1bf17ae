use rug::Integer;

use super::qexp::{delta, eisenstein_e4, eisenstein_e6, QExpansion};
use crate::error::{Error, Result};

/// dim S_k for SL_2(Z).
pub fn dim_cusp_space(k: i64) -> Result<usize> {
    if k < 0 || k % 2 != 0 {
        return Err(Error::invalid(format!(
            "weight {k} must be even and nonnegative"
        )));
    }
    if k < 12 {
        return Ok(0);
    }
    let base = (k / 12) as usize;
    Ok(if k % 12 == 2 { base - 1 } else { base })
}

/// The weight-e Eisenstein monomial used in the basis construction, with
/// e = k mod 12 except that e = 14 replaces e = 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Cofactor {
    One,
    E4,
    E6,
    E4Sq,
    E4E6,
    E4SqE6,
}

impl Cofactor {
    pub(crate) fn for_weight(k: u32) -> (Cofactor, usize) {
        let mut e = k % 12;
        if e == 2 {
            e = 14;
        }
        let n = ((k - e) / 12) as usize;
        let c = match e {
            0 => Cofactor::One,
            4 => Cofactor::E4,
            6 => Cofactor::E6,
            8 => Cofactor::E4Sq,
            10 => Cofactor::E4E6,
            14 => Cofactor::E4SqE6,
            _ => unreachable!(),
        };
        (c, n)
    }

    pub(crate) fn e4_power(self) -> u32 {
        match self {
            Cofactor::One | Cofactor::E6 => 0,
            Cofactor::E4 | Cofactor::E4E6 => 1,
            Cofactor::E4Sq | Cofactor::E4SqE6 => 2,
        }
    }

    pub(crate) fn has_e6(self) -> bool {
        matches!(self, Cofactor::E6 | Cofactor::E4E6 | Cofactor::E4SqE6)
    }
}

/// Echelonized cusp basis together with the unreduced generators
/// Delta^j E_6^{2(d-j)} A and the integer matrix taking generators to basis.
#[derive(Clone, Debug)]
pub struct MillerData {
    pub weight: u32,
    pub basis: Vec<QExpansion>,
    /// transform[i][j]: basis_i = sum_j transform[i][j] * generator_j
    pub(crate) transform: Vec<Vec<Integer>>,
}

pub(crate) fn generators(k: u32, len: usize) -> Vec<QExpansion> {
    let (cof, d) = Cofactor::for_weight(k);
    let e4 = eisenstein_e4(len);
    let e6 = eisenstein_e6(len);
    let dl = delta(len);
    let mut a = QExpansion::one(len);
    for _ in 0..cof.e4_power() {
        a = a.mul(&e4);
    }
    if cof.has_e6() {
        a = a.mul(&e6);
    }
    let e6sq = e6.mul(&e6);
    (1..=d)
        .map(|j| dl.pow(j as u32).mul(&e6sq.pow((d - j) as u32)).mul(&a))
        .collect()
}

pub fn miller_data(k: u32, len: usize) -> Result<MillerData> {
    let d = dim_cusp_space(k as i64)?;
    if d == 0 {
        return Err(Error::EmptySpace(k));
    }
    if len < d {
        return Err(Error::invalid(format!(
            "truncation {len} shorter than dim S_{k} = {d}"
        )));
    }
    let gens = generators(k, len);
    // gens[j] = q^{j+1} + ...; invert the unit upper triangular leading block
    let mut transform = vec![vec![Integer::new(); d]; d];
    for i in (0..d).rev() {
        transform[i][i] = Integer::from(1);
        for m in (i + 1)..d {
            // coefficient of q^{m+1} in sum_j transform[i][j] gens[j] must vanish
            let mut c = Integer::new();
            for j in i..m {
                c += &transform[i][j] * gens[j].coeff(m + 1);
            }
            transform[i][m] = -c;
        }
    }
    let basis = (0..d)
        .map(|i| {
            let mut coeffs = vec![Integer::new(); len + 1];
            for (j, g) in gens.iter().enumerate() {
                let t = &transform[i][j];
                if *t == 0 {
                    continue;
                }
                for n in 1..=len {
                    coeffs[n] += t * g.coeff(n);
                }
            }
            QExpansion::new(k, coeffs).expect("even weight")
        })
        .collect();
    Ok(MillerData {
        weight: k,
        basis,
        transform,
    })
}

/// Echelonized integer basis of S_k: element i has a(j) = delta_ij for 1 <= j <= dim.
pub fn miller_basis(k: u32, len: usize) -> Result<Vec<QExpansion>> {
    if !k.is_multiple_of(2) {
        return Err(Error::invalid(format!("weight {k} is odd")));
    }
    miller_data(k, len).map(|m| m.basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    /// Rank of the q-expansion matrix of all monomials E4^a E6^b of weight k.
    fn modular_space_rank(k: u32, len: usize) -> usize {
        let e4 = eisenstein_e4(len);
        let e6 = eisenstein_e6(len);
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for a in 0..=k / 4 {
            let rem = k as i64 - 4 * a as i64;
            if rem < 0 || rem % 6 != 0 {
                continue;
            }
            let b = (rem / 6) as u32;
            let m = e4.pow(a).mul(&e6.pow(b));
            rows.push(m.coeffs().iter().map(Rational::from).collect());
        }
        // Gaussian elimination over Q
        let mut rank = 0;
        let cols = len + 1;
        for c in 0..cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
                continue;
            };
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r][c] != 0 {
                    let f = Rational::from(&rows[r][c] / &rows[rank][c]);
                    for cc in c..cols {
                        let t = Rational::from(&f * &rows[rank][cc]);
                        rows[r][cc] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn dimension_matches_monomial_rank() {
        for k in (4..=72).step_by(2) {
            let dim_m = modular_space_rank(k, 20);
            assert_eq!(dim_cusp_space(k as i64).unwrap(), dim_m - 1, "k = {k}");
        }
        assert_eq!(dim_cusp_space(0).unwrap(), 0);
        assert_eq!(dim_cusp_space(2).unwrap(), 0);
        assert_eq!(dim_cusp_space(10).unwrap(), 0);
        assert_eq!(dim_cusp_space(12).unwrap(), 1);
        assert_eq!(dim_cusp_space(24).unwrap(), 2);
        assert!(dim_cusp_space(13).is_err());
        assert!(dim_cusp_space(-4).is_err());
    }

    #[test]
    fn weight_12_is_delta() {
        let b = miller_basis(12, 5).unwrap();
        assert_eq!(b.len(), 1);
        let got: Vec<i64> = (1..=5).map(|n| b[0].coeff(n).to_i64().unwrap()).collect();
        assert_eq!(got, vec![1, -24, 252, -1472, 4830]);
    }

    #[test]
    fn weight_16_is_e4_delta() {
        let b = miller_basis(16, 3).unwrap();
        assert_eq!(b.len(), 1);
        let e4d = eisenstein_e4(3).mul(&delta(3));
        assert_eq!(b[0].coeffs(), e4d.coeffs());
        assert_eq!(*b[0].coeff(1), 1);
    }

    #[test]
    fn empty_space_and_short_truncation() {
        assert!(matches!(miller_basis(10, 3), Err(Error::EmptySpace(10))));
        assert!(matches!(
            miller_basis(24, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn echelon_shape() {
        for k in (12..=80).step_by(2) {
            let Ok(b) = miller_basis(k, 30) else { continue };
            let d = b.len();
            for (i, f) in b.iter().enumerate() {
                assert_eq!(f.weight(), k);
                assert!(f.is_cusp());
                for j in 1..=d {
                    assert_eq!(*f.coeff(j), (i + 1 == j) as i64, "k={k} i={i} j={j}");
                }
            }
        }
    }
}
