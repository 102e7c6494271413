//! CSV and JSON report files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ingham_core::verify::ExperimentReport;
use serde::Serialize;

use crate::config::{Format, RunConfig};

pub const CSV_HEADER: [&str; 4] = ["abscissa", "measured", "reference", "ratio"];

/// `path.csv` and `path.json`; a `.csv` or `.json` extension on the
/// configured path is dropped first.
pub fn targets(path: &Path, format: Format) -> Vec<PathBuf> {
    let base = match path.extension().and_then(|e| e.to_str()) {
        Some("csv" | "json") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let mut out = Vec::new();
    if format.csv() {
        out.push(with_suffix(&base, "csv"));
    }
    if format.json() {
        out.push(with_suffix(&base, "json"));
    }
    out
}

fn with_suffix(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Fails early when the output directory does not exist.
pub fn check_writable(path: &Path) -> Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        bail!("output directory {} does not exist", parent.display());
    }
    Ok(())
}

/// Twelve significant digits.
fn number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.11e}")
    }
}

pub fn csv_bytes(report: &ExperimentReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in &report.rows {
        w.write_record([
            number(row.abscissa),
            number(row.measured),
            row.reference.map(number).unwrap_or_default(),
            row.ratio.map(number).unwrap_or_default(),
        ])?;
    }
    w.into_inner().context("flushing CSV buffer")
}

#[derive(Serialize)]
struct Sidecar<'a> {
    experiment: &'a str,
    passed: bool,
    config: &'a RunConfig,
    report: &'a ExperimentReport,
}

pub fn json_bytes(config: &RunConfig, report: &ExperimentReport) -> Result<Vec<u8>> {
    let sidecar = Sidecar {
        experiment: config.experiment.name(),
        passed: report.passed(),
        config,
        report,
    };
    let mut out = serde_json::to_vec_pretty(&sidecar)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes every requested file; on failure removes the ones already written.
pub fn write(config: &RunConfig, report: &ExperimentReport) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for path in targets(&config.output.path, config.output.format) {
        let bytes = if path.extension().is_some_and(|e| e == "csv") {
            csv_bytes(report)?
        } else {
            json_bytes(config, report)?
        };
        if let Err(e) = fs::write(&path, bytes) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e).with_context(|| format!("writing {}", path.display()));
        }
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ingham_core::verify::Row;

    #[test]
    fn csv_layout() {
        let mut report = ExperimentReport::new("x", "t");
        report.rows.push(Row::new(10.0, 0.5, Some(0.25)));
        report.rows.push(Row::new(20.0, 0.125, None));
        let text = String::from_utf8(csv_bytes(&report).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "abscissa,measured,reference,ratio");
        assert_eq!(lines[1], "1.00000000000e1,5.00000000000e-1,2.50000000000e-1,2.00000000000e0");
        assert_eq!(lines[2], "2.00000000000e1,1.25000000000e-1,,");
    }

    #[test]
    fn target_names() {
        let t = targets(Path::new("out/run.csv"), Format::Both);
        assert_eq!(t, vec![PathBuf::from("out/run.csv"), PathBuf::from("out/run.json")]);
        let t = targets(Path::new("a.b"), Format::Json);
        assert_eq!(t, vec![PathBuf::from("a.b.json")]);
    }
}
