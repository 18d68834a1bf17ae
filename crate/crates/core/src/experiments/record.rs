use crate::error::{Error, Result};
use crate::io::{fmt_f64, CsvTable};

/// One summand of an experiment, re-evaluable on its own.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub label: String,
    pub value: f64,
}

/// The outcome of one scan: value, error estimate, parameters and per-term breakdown.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub params: Vec<(String, String)>,
    pub value: f64,
    pub error: f64,
    pub diagnostics: Vec<(String, String)>,
    pub terms: Vec<Term>,
}

impl ExperimentRecord {
    pub fn new(experiment: &str) -> Self {
        ExperimentRecord {
            experiment: experiment.to_string(),
            params: Vec::new(),
            value: 0.0,
            error: 0.0,
            diagnostics: Vec::new(),
            terms: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.diagnostics.push((key.to_string(), value.to_string()));
    }

    pub fn note_f64(&mut self, key: &str, value: f64) {
        self.note(key, fmt_f64(value));
    }

    pub fn get_param(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_note(&self, key: &str) -> Option<&str> {
        self.diagnostics
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn push_term(&mut self, label: impl Into<String>, value: f64) {
        self.terms.push(Term {
            label: label.into(),
            value,
        });
    }

    /// Sum of the recorded terms in order.
    pub fn term_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.value).sum()
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !(self.error >= 0.0) {
            return Err(Error::Anomaly(format!(
                "{}: error estimate {} is negative",
                self.experiment, self.error
            )));
        }
        if !self.value.is_finite() {
            return Err(Error::Anomaly(format!(
                "{}: value {} is not finite",
                self.experiment, self.value
            )));
        }
        Ok(())
    }

    fn diagnostics_text(&self) -> String {
        self.diagnostics
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Long-format table: experiment, the union of parameter keys in first-seen order, value, error, diagnostics.
pub fn records_table(records: &[ExperimentRecord]) -> CsvTable {
    let mut keys: Vec<&str> = Vec::new();
    for r in records {
        for (k, _) in &r.params {
            if !keys.contains(&k.as_str()) {
                keys.push(k);
            }
        }
    }
    let mut header = vec!["experiment"];
    header.extend(keys.iter().copied());
    header.extend(["value", "error", "diagnostics"]);
    let mut table = CsvTable::new(&header);
    for r in records {
        let mut row = vec![r.experiment.clone()];
        row.extend(
            keys.iter()
                .map(|k| r.get_param(k).unwrap_or("").to_string()),
        );
        row.extend([fmt_f64(r.value), fmt_f64(r.error), r.diagnostics_text()]);
        table.push(row).expect("row width matches header");
    }
    table
}

/// experiment, term, value for every term of every record.
pub fn terms_table(records: &[ExperimentRecord]) -> CsvTable {
    let mut table = CsvTable::new(&["experiment", "term", "value"]);
    for r in records {
        for t in &r.terms {
            table
                .push(vec![
                    r.experiment.clone(),
                    t.label.clone(),
                    fmt_f64(t.value),
                ])
                .expect("row width matches header");
        }
    }
    table
}
