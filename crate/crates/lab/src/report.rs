//! Report emission: CSV tables, SVG line plots and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::KeyValues;
use crate::error::{LabError, LabResult};
use crate::formats::write_text;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
    Missing,
}

impl Value {
    /// Shortest text that reads back as the same value; missing and
    /// non-finite reals are written as empty fields and `nan`/`inf`.
    pub fn render(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(v) => Some(v as f64),
            Value::Real(v) => Some(v),
            _ => None,
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Value {
        Value::Real(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Value {
        Value::Int(v as i64)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Value {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Value {
        // Seeds above i64::MAX are kept exact as text.
        i64::try_from(v).map(Value::Int).unwrap_or_else(|_| Value::Text(v.to_string()))
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Value {
        Value::Text(v.to_string())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Value {
        v.map_or(Value::Missing, Into::into)
    }
}

/// A named table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Table {
        Table { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match the header of `{}`", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        // Writing to memory cannot fail.
        w.write_record(&self.header).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r.iter().map(Value::render)).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
    }
}

/// A line plot: named series of `(x, y)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

impl Plot {
    pub fn to_svg(&self) -> String {
        let (w, h, m) = (640.0, 420.0, 60.0);
        let pts = self.series.iter().flat_map(|s| s.1.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x1 = x0 + 1.0;
        }
        if y1 - y0 < 1e-12 {
            y1 = y0 + 1.0;
        }
        let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
        let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(&self.title));
        let _ = writeln!(
            s,
            r#"<path d="M{m} {m} V{} H{}" fill="none" stroke="black"/>"#,
            h - m,
            w - m
        );
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, sx(fx), h - m + 16.0, tick(fx));
            let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, m - 6.0, sy(fy) + 4.0, tick(fy));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 16.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            escape(&self.y_label)
        );
        for (k, (label, data)) in self.series.iter().enumerate() {
            let colour = COLOURS[k % COLOURS.len()];
            let path: Vec<String> = data
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            if !path.is_empty() {
                let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, path.join(" "));
                for p in &path {
                    let (x, y) = p.split_once(',').unwrap();
                    let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{colour}"/>"#);
                }
            }
            let ly = m + 16.0 * k as f64;
            let _ = writeln!(s, r#"<text x="{}" y="{ly}" fill="{colour}">{}</text>"#, w - m - 140.0, escape(label));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{:.3}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tables and plots of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
    /// One-line summaries, written to the manifest.
    pub summary: Vec<(String, String)>,
}

impl ExperimentReport {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// SHA-256 of the canonical configuration text, in hex.
pub fn config_hash(config: &KeyValues) -> String {
    let digest = Sha256::digest(config.canonical().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn version_string() -> String {
    format!("conflimit {}", env!("CARGO_PKG_VERSION"))
}

/// Writes `<table>.csv`, `<plot>.svg` and `manifest.txt` into `dir` and
/// returns the paths written.
pub fn write_report(dir: &Path, config: &KeyValues, report: &ExperimentReport) -> LabResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let mut written = Vec::new();
    for t in &report.tables {
        let p = dir.join(format!("{}.csv", t.name));
        write_text(&p, &t.to_csv())?;
        written.push(p);
    }
    for plot in &report.plots {
        let p = dir.join(format!("{}.svg", plot.name));
        write_text(&p, &plot.to_svg())?;
        written.push(p);
    }
    let mut m = String::new();
    let _ = writeln!(m, "experiment = {}", report.experiment);
    let _ = writeln!(m, "version = {}", version_string());
    let _ = writeln!(m, "config_sha256 = {}", config_hash(config));
    m.push_str("\n[config]\n");
    m.push_str(&config.canonical());
    m.push_str("\n[summary]\n");
    for (k, v) in &report.summary {
        let _ = writeln!(m, "{k} = {v}");
    }
    m.push_str("\n[files]\n");
    for p in &written {
        let _ = writeln!(m, "{}", p.file_name().unwrap_or_default().to_string_lossy());
    }
    let p = dir.join("manifest.txt");
    write_text(&p, &m)?;
    written.push(p);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_shortest_round_trip_floats() {
        let mut t = Table::new("t", &["n", "x", "note"]);
        t.push(vec![Value::from(3usize), Value::from(0.1), Value::from("a,b")]);
        t.push(vec![Value::from(4usize), Value::from(None::<f64>), Value::from(1e-20)]);
        let csv = t.to_csv();
        assert_eq!(csv, "n,x,note\n3,0.1,\"a,b\"\n4,,0.00000000000000000001\n");
        let back: f64 = "0.00000000000000000001".parse().unwrap();
        assert_eq!(back, 1e-20);
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_a_bug() {
        let mut t = Table::new("t", &["a"]);
        t.push(vec![Value::Missing, Value::Missing]);
    }

    #[test]
    fn hash_depends_on_content_only() {
        let a = KeyValues::parse("seed = 1\nn = 8\n").unwrap();
        let b = KeyValues::parse("n = 8\n# comment\nseed = 1\n").unwrap();
        let c = KeyValues::parse("n = 8\nseed = 2\n").unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&c));
        assert_eq!(config_hash(&a).len(), 64);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let p = Plot {
            name: "p".into(),
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![("s".into(), vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0)])],
        };
        let s = p.to_svg();
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("a &lt; b"));
        assert_eq!(s.matches("<circle").count(), 2);
    }
}
