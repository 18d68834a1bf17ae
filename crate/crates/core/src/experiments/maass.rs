use std::collections::BTreeMap;
use std::fmt;

use crate::arith::numtheory::{factorize, is_prime, multiplicative_table, primes_up_to};
use crate::error::{Error, Result};
use crate::modforms::prime_power_from;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl std::str::FromStr for Parity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(format!("unknown parity '{other}'")),
        }
    }
}

/// Ingested Hecke-Maass cusp form: spectral parameter and stored eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct MaassFormData {
    pub t_phi: f64,
    pub parity: Parity,
    /// Stored lambda(n); values at other n follow from Hecke multiplicativity.
    pub lambda: BTreeMap<u64, f64>,
    pub source: String,
}

impl MaassFormData {
    pub fn new(
        t_phi: f64,
        parity: Parity,
        lambda: BTreeMap<u64, f64>,
        source: impl Into<String>,
    ) -> Self {
        MaassFormData {
            t_phi,
            parity,
            lambda,
            source: source.into(),
        }
    }

    /// Short label used in records and diagnostics.
    pub fn label(&self) -> String {
        format!("t={:.6}/{}", self.t_phi, self.parity)
    }

    /// Largest N such that every prime up to N has a stored eigenvalue.
    pub fn prime_coverage(&self) -> u64 {
        let top = self.lambda.keys().next_back().copied().unwrap_or(1);
        let mut covered = 1;
        for p in primes_up_to(top as usize) {
            if !self.lambda.contains_key(&p) {
                return covered;
            }
            covered = p;
        }
        // every prime below the largest stored key is present
        top
    }

    fn at_prime(&self, p: u64) -> Result<f64> {
        self.lambda
            .get(&p)
            .copied()
            .ok_or_else(|| Error::DataExhausted {
                what: format!("Maass form {}", self.label()),
                needed: p,
                available: self.prime_coverage(),
            })
    }

    /// lambda(n): stored value if present, otherwise from the prime factorization.
    pub fn lambda_at(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::invalid("lambda(0) is undefined"));
        }
        if let Some(v) = self.lambda.get(&n) {
            return Ok(*v);
        }
        let mut acc = 1.0;
        for (p, e) in factorize(n) {
            let pe = p.pow(e);
            acc *= match self.lambda.get(&pe) {
                Some(v) => *v,
                None => prime_power_from(self.at_prime(p)?, e),
            };
        }
        Ok(acc)
    }

    /// Dense table lambda(0..=len) (entry 0 unused).
    pub fn table(&self, len: usize) -> Result<Vec<f64>> {
        if len >= 2 {
            for p in primes_up_to(len) {
                self.at_prime(p)?;
            }
        }
        let mut t = multiplicative_table(len, |p, e| {
            let pe = p.pow(e);
            match self.lambda.get(&pe) {
                Some(v) => *v,
                None => prime_power_from(self.lambda[&p], e),
            }
        });
        for (n, v) in self.lambda.range(1..=len as u64) {
            t[*n as usize] = *v;
        }
        Ok(t)
    }

    /// Checks used at ingestion: t > 0, lambda(1) = 1, Hecke relation at (2, 3).
    pub fn validate(&self, tol: f64) -> Result<()> {
        if !(self.t_phi > 0.0 && self.t_phi.is_finite()) {
            return Err(Error::DataIntegrity(format!(
                "spectral parameter {} must be positive",
                self.t_phi
            )));
        }
        match self.lambda.get(&1) {
            Some(v) if (*v - 1.0).abs() <= tol => {}
            Some(v) => return Err(Error::DataIntegrity(format!("lambda(1) = {v}, expected 1"))),
            None => return Err(Error::DataIntegrity("lambda(1) missing".into())),
        }
        if let (Some(a), Some(b), Some(c)) = (
            self.lambda.get(&2),
            self.lambda.get(&3),
            self.lambda.get(&6),
        ) {
            if (a * b - c).abs() > tol {
                return Err(Error::DataIntegrity(format!(
                    "Hecke relation lambda(2)lambda(3) = lambda(6) fails: {} vs {}",
                    a * b,
                    c
                )));
            }
        }
        if let Some((&n, _)) = self.lambda.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::DataIntegrity(format!("lambda({n}) is not finite")));
        }
        Ok(())
    }

    /// Primes with stored values, used by exponential-sum scans.
    pub fn stored_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.lambda.keys().copied().filter(|n| is_prime(*n))
    }
}
