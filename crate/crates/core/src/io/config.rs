use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::lfun::{AfeOptions, Smoothing};

/// Run configuration, read from `key = value` lines.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// Working precision in bits for eigenform construction.
    pub precision: u32,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub out_dir: PathBuf,
    pub maass_data: Option<PathBuf>,
    pub k_grid: Vec<u32>,
    pub ell_grid: Vec<u32>,
    pub t_grid: Vec<f64>,
    pub smoothing: Smoothing,
    pub afe_threshold: f64,
    pub afe_eps: f64,
    pub afe_cutoff: Option<usize>,
    pub ptf_tolerance: f64,
    pub parseval_tolerance: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision: 160,
            threads: 0,
            out_dir: PathBuf::from("results"),
            maass_data: None,
            k_grid: vec![12, 16, 20, 24, 32, 40],
            ell_grid: vec![12, 16, 20],
            t_grid: vec![0.0, 0.5],
            smoothing: Smoothing::Unsmoothed,
            afe_threshold: 1e-12,
            afe_eps: 0.5,
            afe_cutoff: None,
            ptf_tolerance: 1e-8,
            parseval_tolerance: 1e-6,
        }
    }
}

fn list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| format!("bad list entry '{}'", s.trim()))
        })
        .collect()
}

fn positive(v: f64, key: &str) -> std::result::Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{key} must be positive"))
    }
}

impl Config {
    /// Reads config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Config> {
        let mut cfg = Config::default();
        let mut seen = std::collections::HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let (key, value) = s.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected 'key = value', found '{s}'"),
            })?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Parse {
                    line,
                    msg: format!("'{key}' set twice"),
                });
            }
            cfg.set_in(key, value.trim(), base)
                .map_err(|msg| Error::Parse { line, msg })?;
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Config> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Config::parse(&text, base)
    }

    /// Applies one override, as from the command line; paths resolve against the working directory.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_in(key, value, Path::new(""))
            .map_err(Error::invalid)?;
        self.check()
    }

    fn set_in(&mut self, key: &str, value: &str, base: &Path) -> std::result::Result<(), String> {
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| format!("{key}: bad number '{v}'"))
        };
        let int = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| format!("{key}: bad integer '{v}'"))
        };
        match key {
            "precision" => self.precision = int(value)? as u32,
            "threads" => self.threads = int(value)?,
            "out_dir" => self.out_dir = base.join(value),
            "maass_data" => self.maass_data = Some(base.join(value)),
            "k_grid" => self.k_grid = list(value)?,
            "ell_grid" => self.ell_grid = list(value)?,
            "t_grid" => self.t_grid = list(value)?,
            "smoothing" => self.smoothing = value.parse().map_err(|e: Error| e.to_string())?,
            "afe_threshold" => self.afe_threshold = positive(num(value)?, key)?,
            "afe_eps" => self.afe_eps = positive(num(value)?, key)?,
            "afe_cutoff" => {
                self.afe_cutoff = match value {
                    "auto" => None,
                    v => Some(int(v)?),
                }
            }
            "ptf_tolerance" => self.ptf_tolerance = positive(num(value)?, key)?,
            "parseval_tolerance" => self.parseval_tolerance = positive(num(value)?, key)?,
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    fn check(&self) -> Result<()> {
        if self.k_grid.is_empty() || self.ell_grid.is_empty() || self.t_grid.is_empty() {
            return Err(Error::invalid("grid ranges must be nonempty"));
        }
        if let Some(&k) = self
            .k_grid
            .iter()
            .chain(&self.ell_grid)
            .find(|k| **k < 12 || **k % 2 == 1)
        {
            return Err(Error::invalid(format!(
                "weight {k} must be even and at least 12"
            )));
        }
        if self.precision < crate::modforms::MIN_PRECISION {
            return Err(Error::invalid(format!(
                "precision must be at least {} bits",
                crate::modforms::MIN_PRECISION
            )));
        }
        if self.afe_eps >= 1.0 {
            return Err(Error::invalid("afe_eps must lie in (0, 1)"));
        }
        if let Some(p) = &self.maass_data {
            if !p.is_file() {
                return Err(Error::invalid(format!(
                    "Maass data file {} not found",
                    p.display()
                )));
            }
        }
        Ok(())
    }

    pub fn afe_options(&self) -> AfeOptions {
        AfeOptions {
            smoothing: self.smoothing,
            eps: self.afe_eps,
            cutoff: self.afe_cutoff,
            threshold: self.afe_threshold,
        }
    }

    /// Canonical text form; parsing it back gives the same config.
    pub fn to_text(&self) -> String {
        let join = |v: &[String]| v.join(",");
        let mut out = String::new();
        let _ = writeln!(out, "precision = {}", self.precision);
        let _ = writeln!(out, "threads = {}", self.threads);
        let _ = writeln!(out, "out_dir = {}", self.out_dir.display());
        if let Some(p) = &self.maass_data {
            let _ = writeln!(out, "maass_data = {}", p.display());
        }
        let _ = writeln!(
            out,
            "k_grid = {}",
            join(
                &self
                    .k_grid
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
            )
        );
        let _ = writeln!(
            out,
            "ell_grid = {}",
            join(
                &self
                    .ell_grid
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
            )
        );
        let _ = writeln!(
            out,
            "t_grid = {}",
            join(
                &self
                    .t_grid
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
            )
        );
        let _ = writeln!(out, "smoothing = {}", self.smoothing);
        let _ = writeln!(out, "afe_threshold = {}", self.afe_threshold);
        let _ = writeln!(out, "afe_eps = {}", self.afe_eps);
        match self.afe_cutoff {
            Some(n) => {
                let _ = writeln!(out, "afe_cutoff = {n}");
            }
            None => {
                let _ = writeln!(out, "afe_cutoff = auto");
            }
        }
        let _ = writeln!(out, "ptf_tolerance = {}", self.ptf_tolerance);
        let _ = writeln!(out, "parseval_tolerance = {}", self.parseval_tolerance);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides() {
        let text = "# desk run\nprecision = 192\nk_grid = 12, 16\nafe_cutoff = 5000\nsmoothing = gaussian\n";
        let c = Config::parse(text, Path::new("/tmp")).unwrap();
        assert_eq!(c.precision, 192);
        assert_eq!(c.k_grid, vec![12, 16]);
        assert_eq!(c.afe_cutoff, Some(5000));
        assert_eq!(c.smoothing, Smoothing::Gaussian);
        assert_eq!(c.ell_grid, Config::default().ell_grid);
    }

    #[test]
    fn rejects_bad_input() {
        let base = Path::new(".");
        for (text, line) in [
            ("precision 12\n", 1),
            ("\nbogus = 1\n", 2),
            ("afe_threshold = -1\n", 1),
            ("k_grid = 12,x\n", 1),
            ("threads = 1\nthreads = 2\n", 2),
        ] {
            match Config::parse(text, base) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(Config::parse("k_grid = 13\n", base).is_err());
        assert!(Config::parse("maass_data = /definitely/not/here.txt\n", base).is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut c = Config::default();
        c.set("t_grid", "0,0.25,1.5").unwrap();
        c.set("afe_cutoff", "1234").unwrap();
        let back = Config::parse(&c.to_text(), Path::new("")).unwrap();
        assert_eq!(back, c);
        assert!(c.set("nonsense", "1").is_err());
    }
}
