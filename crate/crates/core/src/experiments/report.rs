use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::weights::Verdict;

pub const VERSION: &str = concat!("bergman-lab ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(k) => k.to_string(),
            Cell::Num(x) if x.is_finite() => format!("{x:.10e}"),
            Cell::Num(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(k) => Some(*k as f64),
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(k: u32) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    /// Numeric column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[k].as_f64()).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_err(e: csv::Error) -> LabError {
    LabError::Io(std::io::Error::other(e))
}

/// Expected and observed classification of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictLine {
    pub check: String,
    pub expected: Verdict,
    pub observed: Verdict,
    pub detail: String,
}

impl VerdictLine {
    pub fn new(check: &str, expected: Verdict, observed: Verdict, detail: String) -> Self {
        VerdictLine {
            check: check.to_string(),
            expected,
            observed,
            detail,
        }
    }

    /// An inequality or tolerance check: bounded when it holds.
    pub fn holds(check: &str, ok: bool, detail: String) -> Self {
        let observed = if ok { Verdict::Bounded } else { Verdict::Growing };
        VerdictLine::new(check, Verdict::Bounded, observed, detail)
    }

    pub fn pass(&self) -> bool {
        self.expected == self.observed
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Human,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub tables: Vec<Table>,
    pub verdicts: Vec<VerdictLine>,
    pub version: String,
    /// Never written to report files.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl RunReport {
    /// 0 when every verdict matches, 2 when something grows where it should
    /// stay bounded, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self
            .verdicts
            .iter()
            .any(|v| v.expected == Verdict::Bounded && v.observed == Verdict::Growing)
        {
            2
        } else if self.verdicts.iter().all(VerdictLine::pass) {
            0
        } else {
            3
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn verdict(&self, check: &str) -> Option<&VerdictLine> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    pub fn verdict_csv(&self) -> Result<String> {
        let mut t = Table::new("verdicts", &["check", "expected", "observed", "pass", "detail"]);
        for v in &self.verdicts {
            t.push(vec![
                v.check.as_str().into(),
                v.expected.to_string().into(),
                v.observed.to_string().into(),
                v.pass().into(),
                v.detail.as_str().into(),
            ]);
        }
        t.to_csv()
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} / {}", self.version, self.config.experiment);
        let _ = writeln!(
            s,
            "map {}  weight {}  depths {}..={}",
            self.config.map, self.config.weight, self.config.depth_min, self.config.depth_max
        );
        for t in &self.tables {
            let _ = writeln!(s, "\n[{}]", t.name);
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(human_cell).collect()).collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|k| cells.iter().map(|r| r[k].len()).chain([t.columns[k].len()]).max().unwrap_or(0))
                .collect();
            let line = |row: &[String]| {
                row.iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let _ = writeln!(s, "{}", line(&t.columns));
            for r in &cells {
                let _ = writeln!(s, "{}", line(r));
            }
        }
        let _ = writeln!(s);
        for v in &self.verdicts {
            let _ = writeln!(
                s,
                "verdict {}: expected {}, observed {} -> {} ({})",
                v.check,
                v.expected,
                v.observed,
                if v.pass() { "PASS" } else { "FAIL" },
                v.detail
            );
        }
        let _ = writeln!(s, "exit status {}", self.exit_code());
        s
    }

    /// Write the report into `dir`; returns the files written.
    pub fn emit(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let stem = self.config.experiment.name();
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            written.push(path);
            Ok(())
        };
        match format {
            Format::Csv => {
                for t in &self.tables {
                    put(format!("{stem}_{}.csv", t.name), t.to_csv()?)?;
                }
                put(format!("{stem}_verdicts.csv"), self.verdict_csv()?)?;
                put(format!("{stem}_config.json"), self.config.to_json()? + "\n")?;
            }
            Format::Human => put(format!("{stem}.txt"), self.human())?,
        }
        Ok(written)
    }
}

fn human_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) if x.is_finite() && x.abs() >= 1e-3 && x.abs() < 1e6 => format!("{x:.6}"),
        Cell::Num(x) if *x == 0.0 => "0".into(),
        Cell::Num(x) if x.is_finite() => format!("{x:.4e}"),
        other => other.render(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::Experiment;

    fn sample() -> RunReport {
        let mut t = Table::new("profile", &["depth", "value", "note"]);
        t.push(vec![4u32.into(), 1.5.into(), "a,b".into()]);
        t.push(vec![5u32.into(), f64::INFINITY.into(), "c".into()]);
        RunReport {
            config: ExperimentConfig::preset(Experiment::WeakType),
            tables: vec![t],
            verdicts: vec![VerdictLine::holds("x", true, String::new())],
            version: VERSION.into(),
            wall_clock: Duration::from_secs(3),
        }
    }

    #[test]
    fn csv_quotes_and_parses() {
        let r = sample();
        let csv = r.tables[0].to_csv().unwrap();
        assert_eq!(csv, "depth,value,note\n4,1.5000000000e0,\"a,b\"\n5,inf,c\n");
        assert_eq!(r.tables[0].column("value").unwrap()[0], 1.5);
    }

    #[test]
    fn exit_codes() {
        let mut r = sample();
        assert_eq!(r.exit_code(), 0);
        r.verdicts.push(VerdictLine::new("y", Verdict::Growing, Verdict::Bounded, String::new()));
        assert_eq!(r.exit_code(), 3);
        r.verdicts.push(VerdictLine::holds("z", false, String::new()));
        assert_eq!(r.exit_code(), 2);
        assert!(r.human().contains("verdict z: expected bounded, observed growing -> FAIL"));
    }
}
