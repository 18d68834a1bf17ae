//! Level-one cusp forms: exact q-expansions, the echelon basis and Hecke eigenforms.

mod eigen;
mod miller;
pub mod ntt;
mod qexp;

pub use eigen::{
    char_poly, cusp_space, default_truncation, eigenforms_of, hecke_basis, hecke_eigenforms,
    prime_power_from, real_roots, set_working_precision, t2_matrix, working_precision, CuspSpace,
    HeckeEigenform, MIN_PRECISION, SEPARATION_TOL,
};
pub use miller::{dim_cusp_space, miller_basis, miller_data, MillerData};
pub use qexp::{delta, eisenstein_e4, eisenstein_e6, sigma_table, QExpansion};

use crate::error::{Error, Result};

/// Eigenvalue listing as read back from the text format.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenformText {
    pub weight: u32,
    pub dim: usize,
    pub lambdas: Vec<(u64, f64)>,
}

/// Writes `weight=<k> dim=<d>` followed by `lambda <n> <value>` for n = 1..=terms.
pub fn serialize_eigenform(f: &HeckeEigenform, terms: usize) -> String {
    let table = f.lambdas(terms);
    let mut out = format!("weight={} dim={}\n", f.weight(), f.space().dim());
    for n in 1..=terms {
        out.push_str(&format!("lambda {} {:e}\n", n, table[n]));
    }
    out
}

pub fn parse_eigenform(text: &str) -> Result<EigenformText> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let mut weight = None;
    let mut dim = None;
    for tok in header.split_whitespace() {
        let (key, val) = tok.split_once('=').ok_or_else(|| Error::Parse {
            line: hline + 1,
            msg: format!("expected key=value, got {tok:?}"),
        })?;
        let bad = |_| Error::Parse {
            line: hline + 1,
            msg: format!("bad value for {key}: {val:?}"),
        };
        match key {
            "weight" => weight = Some(val.parse::<u32>().map_err(bad)?),
            "dim" => dim = Some(val.parse::<usize>().map_err(bad)?),
            _ => {
                return Err(Error::Parse {
                    line: hline + 1,
                    msg: format!("unknown header key {key:?}"),
                })
            }
        }
    }
    let (Some(weight), Some(dim)) = (weight, dim) else {
        return Err(Error::Parse {
            line: hline + 1,
            msg: "header needs weight= and dim=".into(),
        });
    };
    let mut lambdas = Vec::new();
    for (i, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        if parts.len() != 3 || parts[0] != "lambda" {
            return Err(err(format!("expected `lambda <n> <value>`, got {line:?}")));
        }
        let n = parts[1]
            .parse::<u64>()
            .map_err(|e| err(format!("index: {e}")))?;
        let v = parts[2]
            .parse::<f64>()
            .map_err(|e| err(format!("value: {e}")))?;
        if n == 0 || !v.is_finite() {
            return Err(err(format!("invalid entry n={n} value={v}")));
        }
        lambdas.push((n, v));
    }
    Ok(EigenformText {
        weight,
        dim,
        lambdas,
    })
}

#[cfg(test)]
mod tests;
