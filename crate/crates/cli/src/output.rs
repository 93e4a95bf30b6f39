//! Provenance headers, number formatting and flat CSV files.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};

pub const TOOL: &str = concat!("pairdyn ", env!("CARGO_PKG_VERSION"));

/// Shortest decimal that round-trips to the same f64; exponent form outside
/// [1e-5, 1e16).
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Ordered `# key: value` lines written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    entries: Vec<(String, String)>,
}

impl Provenance {
    pub fn for_config(config: &ScenarioConfig) -> Self {
        let mut p = Self::default();
        p.push("tool", TOOL);
        p.push("config_sha256", &config.config_hash);
        p.push("seed", config.seed.to_string());
        p.push("scenario", config.scenario.name());
        p.push("tolerance", fmt_num(config.tolerance));
        for (k, v) in config.parameters() {
            p.push(format!("param.{k}"), v);
        }
        p
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s
    }

    fn parse_line(line: &str) -> Option<(String, String)> {
        let body = line.strip_prefix("# ")?;
        let (k, v) = body.split_once(": ")?;
        Some((k.to_string(), v.to_string()))
    }
}

/// One CSV line, newline included.
pub fn render_row(row: &[f64]) -> String {
    let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
    let mut line = cells.join(",");
    line.push('\n');
    line
}

/// Column names plus numeric rows, behind a provenance header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub provenance: Provenance,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(provenance: Provenance, columns: &[&str]) -> Self {
        Self { provenance, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn render(&self) -> String {
        let mut s = self.provenance.render();
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&render_row(row));
        }
        s
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.render())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Self::default();
        let mut lines = text.lines();
        let header = loop {
            match lines.next() {
                Some(l) if l.starts_with('#') => {
                    let (k, v) = Provenance::parse_line(l)
                        .ok_or_else(|| CliError::Usage(format!("malformed header line {l:?}")))?;
                    table.provenance.push(k, v);
                }
                Some(l) => break l,
                None => return Err(CliError::Usage("CSV has no column header".into())),
            }
        };
        table.columns = header.split(',').map(|c| c.trim().to_string()).collect();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| CliError::Usage(format!("row {}: {e}", n + 1)))?;
            if row.len() != table.columns.len() {
                return Err(CliError::Usage(format!(
                    "row {} has {} cells, header has {}",
                    n + 1,
                    row.len(),
                    table.columns.len()
                )));
            }
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Self::parse(&text)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, -2.5e-12, 6.02e23, 1e-5, 9.999e15, f64::MIN_POSITIVE, 0.25] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1e-7), "1e-7");
    }

    #[test]
    fn table_round_trip() {
        let mut p = Provenance::default();
        p.push("tool", TOOL);
        p.push("note", "a: b");
        let mut t = CsvTable::new(p, &["t", "x"]);
        t.rows.push(vec![0.0, 1.0 / 3.0]);
        t.rows.push(vec![1e-9, -4.0]);
        let back = CsvTable::parse(&t.render()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.provenance.get("note"), Some("a: b"));
        assert_eq!(back.column("x").unwrap(), vec![1.0 / 3.0, -4.0]);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(CsvTable::parse("t,x\n1,2\n3\n").is_err());
        assert!(CsvTable::parse("# only header\n").is_err());
    }
}
