use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::{Error, Result};

/// A numeric CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem; written as `<name>.csv`.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Twelve significant digits in scientific notation.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        // Avoid a signed zero leaking into otherwise identical outputs.
        return format!("{:.11e}", 0.0);
    }
    format!("{v:.11e}")
}

/// Everything a run produces.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    /// `key = value` lines for `summary.txt`.
    pub summary: Vec<(String, String)>,
    /// Set when a cross-check failed; files are still written.
    pub consistency_failure: Option<String>,
}

impl RunOutput {
    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }

    pub fn value(&mut self, key: impl Into<String>, v: f64) {
        self.note(key, format!("{v:e}"));
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes every table as CSV plus `summary.txt`, and optionally `plot.py`.
/// Returns the written paths in a fixed order.
pub fn write_results(output: &RunOutput, dir: &Path, plot_script: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut written = Vec::new();
    for table in &output.tables {
        let path = dir.join(format!("{}.csv", table.name));
        fs::write(&path, table.to_csv()).map_err(|e| io_error(&path, e))?;
        written.push(path);
    }
    let mut summary = String::new();
    for (k, v) in &output.summary {
        let _ = writeln!(summary, "{k} = {v}");
    }
    if let Some(why) = &output.consistency_failure {
        let _ = writeln!(summary, "consistency_failure = {why}");
    }
    let path = dir.join("summary.txt");
    fs::write(&path, summary).map_err(|e| io_error(&path, e))?;
    written.push(path);
    if plot_script {
        let path = dir.join("plot.py");
        fs::write(&path, plot_script_text(output)).map_err(|e| io_error(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// A matplotlib script drawing every table: first column against the rest.
pub fn plot_script_text(output: &RunOutput) -> String {
    let mut s = String::from(
        "#!/usr/bin/env python3\n\
         import csv\n\
         import os\n\
         import matplotlib.pyplot as plt\n\n\
         HERE = os.path.dirname(os.path.abspath(__file__))\n\n\n\
         def load(name):\n    \
         with open(os.path.join(HERE, name)) as f:\n        \
         rows = list(csv.reader(f))\n    \
         header, data = rows[0], rows[1:]\n    \
         cols = list(zip(*[[float(x) for x in r] for r in data]))\n    \
         return header, cols\n\n\n\
         FILES = [\n",
    );
    for t in &output.tables {
        let _ = writeln!(s, "    \"{}.csv\",", t.name);
    }
    s.push_str(
        "]\n\n\
         for name in FILES:\n    \
         header, cols = load(name)\n    \
         fig, ax = plt.subplots()\n    \
         for label, col in zip(header[1:], cols[1:]):\n        \
         ax.plot(cols[0], col, label=label)\n    \
         ax.set_xlabel(header[0])\n    \
         ax.set_title(name)\n    \
         ax.legend()\n    \
         fig.savefig(os.path.join(HERE, name.replace(\".csv\", \".png\")), dpi=150)\n",
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new("transient", &["t_gamma_aa", "C"]);
        t.push(vec![0.0, 0.0]);
        t.push(vec![0.5, 0.123456789012345]);
        t.push(vec![1.0, -0.0]);
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t_gamma_aa,C");
        assert_eq!(lines[2], "5.00000000000e-1,1.23456789012e-1");
        assert_eq!(lines[3], "1.00000000000e0,0.00000000000e0");
    }

    #[test]
    fn writes_files_and_script() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = RunOutput::default();
        out.tables.push(Table::new("rates", &["x", "y"]));
        out.note("peak", 0.5);
        let files = write_results(&out, dir.path(), true).unwrap();
        assert_eq!(files.len(), 3);
        let script = fs::read_to_string(dir.path().join("plot.py")).unwrap();
        assert!(script.contains("\"rates.csv\""));
        assert_eq!(fs::read_to_string(dir.path().join("summary.txt")).unwrap(), "peak = 0.5\n");
    }

    #[test]
    fn unwritable_destination() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = write_results(&RunOutput::default(), &blocker.join("sub"), false).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
