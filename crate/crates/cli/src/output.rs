//! Locale-independent CSV output with 12 significant digits.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::error::CliError;

/// Shortest round-trip form of `x` rounded to 12 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        return "0".into();
    }
    if (1e-5..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }
}

/// Opens the destination before any computation, so a bad path fails fast.
pub enum Sink {
    Stdout,
    File(File, String),
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => File::create(p)
                .map(|f| Sink::File(f, p.display().to_string()))
                .map_err(|e| CliError::Path(format!("cannot write {}: {e}", p.display()))),
        }
    }

    pub fn write(self, table: &Table) -> Result<(), CliError> {
        let (w, name): (Box<dyn Write>, String) = match self {
            Sink::Stdout => (Box::new(io::stdout().lock()), "stdout".into()),
            Sink::File(f, name) => (Box::new(f), name),
        };
        let io_err = |e: csv::Error| CliError::Path(format!("writing {name}: {e}"));
        let mut csv = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        csv.write_record(&table.header).map_err(io_err)?;
        for row in &table.rows {
            csv.write_record(row.iter().map(|&x| format_number(x)))
                .map_err(io_err)?;
        }
        csv.flush().map_err(|e| CliError::Path(format!("writing {name}: {e}")))
    }
}
