use std::fs;
use std::path::{Path, PathBuf};

use ancilla::stochastic::sci;
use serde_json::Value;

use crate::error::CliError;

/// One CSV file: header plus rows of already-formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub log_y: bool,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            log_y: false,
        }
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let wrap = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.header).map_err(wrap)?;
        for row in &self.rows {
            w.write_record(row).map_err(wrap)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }

    fn gnuplot(&self) -> String {
        let mut s = String::new();
        s.push_str("set datafile separator ','\n");
        s.push_str("set key autotitle columnhead\n");
        s.push_str(&format!("set xlabel '{}'\n", self.header[0]));
        if self.log_y {
            s.push_str("set logscale y\n");
        }
        s.push_str(&format!(
            "plot for [i=2:{}] '{}' using 1:i with linespoints\n",
            self.header.len(),
            self.file_name()
        ));
        s
    }
}

/// Number cell; non-finite values are written as empty cells.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        sci(x)
    } else {
        String::new()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes every table (and optionally a gnuplot script per table) plus
/// `summary.json` into `dir`, returning the written paths.
pub fn write_all(dir: &Path, tables: &[Table], summary: &Value, gnuplot: bool) -> Result<Vec<PathBuf>, CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Output(format!("{}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    for table in tables {
        let path = dir.join(table.file_name());
        fs::write(&path, table.to_bytes()?).map_err(|e| io(&path, e))?;
        written.push(path);
        if gnuplot {
            let gp = dir.join(format!("{}.gp", table.name));
            fs::write(&gp, table.gnuplot()).map_err(|e| io(&gp, e))?;
            written.push(gp);
        }
    }
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(summary).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| io(&path, e))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_bytes_and_cells() {
        let mut t = Table::new("demo", &["t", "y"]);
        t.push(vec![num(0.5), num(f64::INFINITY)]);
        let text = String::from_utf8(t.to_bytes().unwrap()).unwrap();
        assert_eq!(text, "t,y\n5.00000000000000e-1,\n");
        assert!(t.gnuplot().contains("plot for [i=2:2] 'demo.csv'"));
        assert_eq!(opt(None), "");
    }
}
