use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{MaassFormData, Parity};

/// Tolerance for the ingestion checks on lambda(1) and lambda(2)lambda(3) = lambda(6).
pub const INGEST_TOLERANCE: f64 = 1e-6;

struct Pending {
    t: f64,
    parity: Parity,
    source: Option<String>,
    lambda: BTreeMap<u64, f64>,
    line: usize,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '%' => out.push_str("%25"),
            c if c.is_whitespace() || c == '=' => {
                let mut buf = [0u8; 4];
                for b in c.encode_utf8(&mut buf).bytes() {
                    let _ = write!(out, "%{b:02X}");
                }
            }
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str, line: usize) -> Result<String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s
                .get(i + 1..i + 3)
                .ok_or_else(|| parse_err(line, "truncated escape in source"))?;
            let b = u8::from_str_radix(hex, 16)
                .map_err(|_| parse_err(line, format!("bad escape %{hex}")))?;
            out.push(b);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| parse_err(line, "source is not UTF-8"))
}

fn parse_header(rest: &str, line: usize) -> Result<Pending> {
    let mut t = None;
    let mut parity = None;
    let mut source = None;
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, found '{field}'")))?;
        match key {
            "t" => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad spectral parameter '{value}'")))?;
                t = Some(v);
            }
            "parity" => parity = Some(value.parse::<Parity>().map_err(|e| parse_err(line, e))?),
            "source" => source = Some(unescape(value, line)?),
            other => return Err(parse_err(line, format!("unknown header field '{other}'"))),
        }
    }
    Ok(Pending {
        t: t.ok_or_else(|| parse_err(line, "form header lacks t="))?,
        parity: parity.ok_or_else(|| parse_err(line, "form header lacks parity="))?,
        source,
        lambda: BTreeMap::new(),
        line,
    })
}

/// Parses the line-oriented Maass text format; `origin` names forms without a source field.
pub fn parse_maass(text: &str, origin: &str) -> Result<Vec<MaassFormData>> {
    let mut forms = Vec::new();
    let mut current: Option<Pending> = None;
    let finish = |p: Pending, forms: &mut Vec<MaassFormData>| -> Result<()> {
        let source = p.source.unwrap_or_else(|| format!("{origin}:{}", p.line));
        let form = MaassFormData::new(p.t, p.parity, p.lambda, source);
        form.validate(INGEST_TOLERANCE).map_err(|e| match e {
            Error::DataIntegrity(m) => {
                Error::DataIntegrity(format!("form at line {}: {m}", p.line))
            }
            other => other,
        })?;
        forms.push(form);
        Ok(())
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.starts_with('#') {
            continue;
        }
        if s.is_empty() {
            if let Some(p) = current.take() {
                finish(p, &mut forms)?;
            }
            continue;
        }
        if let Some(rest) = s.strip_prefix("form ") {
            if let Some(p) = current.take() {
                finish(p, &mut forms)?;
            }
            current = Some(parse_header(rest, line)?);
            continue;
        }
        let p = current
            .as_mut()
            .ok_or_else(|| parse_err(line, "coefficient line outside a form block"))?;
        let mut parts = s.split_whitespace();
        let (Some(n), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(line, "expected '<n> <lambda>'"));
        };
        let n: u64 = n
            .parse()
            .map_err(|_| parse_err(line, format!("bad index '{n}'")))?;
        if n == 0 {
            return Err(parse_err(line, "index must be positive"));
        }
        let v: f64 = v
            .parse()
            .map_err(|_| parse_err(line, format!("bad value '{v}'")))?;
        if !v.is_finite() {
            return Err(parse_err(line, format!("lambda({n}) is not finite")));
        }
        if p.lambda.insert(n, v).is_some() {
            return Err(parse_err(line, format!("lambda({n}) given twice")));
        }
    }
    if let Some(p) = current.take() {
        finish(p, &mut forms)?;
    }
    Ok(forms)
}

pub fn ingest_maass(path: impl AsRef<Path>) -> Result<Vec<MaassFormData>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_maass(&text, &path.display().to_string())
}

/// Text that `parse_maass` reads back to the same forms.
pub fn serialize_maass(forms: &[MaassFormData]) -> String {
    let mut out = String::from("# Hecke-Maass cusp forms\n");
    for (i, f) in forms.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "form t={} parity={} source={}",
            f.t_phi,
            f.parity,
            escape(&f.source)
        );
        for (n, v) in &f.lambda {
            let _ = writeln!(out, "{n} {v}");
        }
    }
    out
}
