//! Configuration, Maass-form data files and CSV output.

mod config;
mod maass;
mod table;

pub use config::Config;
pub use maass::{ingest_maass, parse_maass, serialize_maass, INGEST_TOLERANCE};
pub use table::{fmt_f64, CsvTable};
