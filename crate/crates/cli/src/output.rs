use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// Column-named rows plus an optional diagnostics object.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub diagnostics: Option<Value>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new(), diagnostics: None }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Index of the first row holding a NaN or infinite number.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.rows.iter().position(|r| r.iter().any(|c| matches!(c, Cell::Num(x) if !x.is_finite())))
    }

    /// CSV with a header line, or a JSON document `{columns, rows, diagnostics}`.
    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(csv_err)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(Cell::csv)).map_err(csv_err)?;
                }
                w.into_inner().map_err(|e| CliError::Io(e.into_error()))
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let m: Map<String, Value> =
                            self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                        Value::Object(m)
                    })
                    .collect();
                let doc = json!({ "columns": self.columns, "rows": rows, "diagnostics": self.diagnostics });
                let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.into()))?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Writes to `out` through a temporary file renamed into place, or to stdout.
pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new(&["t", "method", "ok"]);
        t.push(vec![Cell::Num(0.1), Cell::Text("auto".into()), Cell::Bool(true)]);
        t.push(vec![Cell::Num(-0.375), Cell::Text("a,b".into()), Cell::Bool(false)]);
        t
    }

    #[test]
    fn csv_has_17_significant_digits_and_quotes() {
        let s = String::from_utf8(table().render(Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "t,method,ok");
        assert_eq!(lines[1], "1.0000000000000001e-1,auto,true");
        assert_eq!(lines[2], "-3.7500000000000000e-1,\"a,b\",false");
    }

    #[test]
    fn json_rows_are_objects() {
        let mut t = table();
        t.diagnostics = Some(json!({ "max_error": 1e-9 }));
        let v: Value = serde_json::from_slice(&t.render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["rows"][0]["method"], "auto");
        assert_eq!(v["rows"][1]["ok"], false);
        assert_eq!(v["diagnostics"]["max_error"], 1e-9);
    }

    #[test]
    fn non_finite_detection() {
        let mut t = table();
        assert_eq!(t.first_non_finite(), None);
        t.push(vec![Cell::Num(f64::NAN), Cell::Text("x".into()), Cell::Bool(true)]);
        assert_eq!(t.first_non_finite(), Some(2));
    }

    #[test]
    fn atomic_file_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit(b"a\n1\n", Some(&path)).unwrap();
        emit(b"a\n2\n", Some(&path)).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a\n2\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
