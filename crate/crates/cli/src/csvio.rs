//! The CSV dialect shared by every command: comma separated, one header row,
//! `t` in the first column, one column per series, floats in the shortest
//! representation that parses back to the same value.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

/// A parsed numeric CSV file, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    /// Source line of every data row, for error messages.
    pub lines: Vec<u64>,
}

impl Table {
    pub fn rows(&self) -> usize {
        self.lines.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.index_of(name).map(|i| self.columns[i].as_slice())
    }

    /// The `t` column when the first header is `t`.
    pub fn time(&self) -> Option<&[f64]> {
        (self.headers.first().map(String::as_str) == Some("t")).then(|| self.columns[0].as_slice())
    }

    /// Indices of all columns except a leading `t`.
    pub fn data_columns(&self) -> Vec<usize> {
        let start = usize::from(self.time().is_some());
        (start..self.headers.len()).collect()
    }
}

/// Shortest round-trip representation, e.g. `0.1`, `1.0`, `-2.5e-10`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn read_table<R: Read>(reader: R, source: &str) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .with_context(|| format!("{source}: cannot read the header row"))?
        .iter()
        .map(str::to_owned)
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        bail!("{source}: missing header row");
    }
    let mut columns = vec![Vec::new(); headers.len()];
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record.with_context(|| format!("{source}: malformed CSV"))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            bail!("{source}, line {line}: expected {} fields, found {}", headers.len(), record.len());
        }
        for (i, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                anyhow::anyhow!("{source}, line {line}, column '{}': cannot parse '{field}' as a number", headers[i])
            })?;
            if !value.is_finite() {
                bail!("{source}, line {line}, column '{}': value '{field}' is not finite", headers[i]);
            }
            columns[i].push(value);
        }
        lines.push(line);
    }
    if lines.is_empty() {
        bail!("{source}: no data rows");
    }
    Ok(Table { headers, columns, lines })
}

/// Reads a file, or standard input for `-`.
pub fn read_table_from(path: &Path) -> Result<Table> {
    if path == Path::new("-") {
        return read_table(io::stdin().lock(), "<stdin>");
    }
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_table(io::BufReader::new(file), &path.display().to_string())
}

/// Writes equally long columns under `headers`.
pub fn write_table<W: Write>(out: W, headers: &[String], columns: &[&[f64]]) -> Result<()> {
    if headers.len() != columns.len() {
        bail!("{} headers for {} columns", headers.len(), columns.len());
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        bail!("columns of unequal length");
    }
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(headers)?;
    let mut record = Vec::with_capacity(columns.len());
    for r in 0..rows {
        record.clear();
        record.extend(columns.iter().map(|c| format_float(c[r])));
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

/// `path` or standard output when `None`.
pub fn write_table_to(path: Option<&Path>, headers: &[String], columns: &[&[f64]]) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            write_table(io::BufWriter::new(file), headers, columns).with_context(|| format!("writing {}", p.display()))
        }
        None => write_table(io::stdout().lock(), headers, columns),
    }
}
