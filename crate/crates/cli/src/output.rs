//! Report serialization: CSV tables and gnuplot-style series blocks.

use std::io::Write;
use std::path::{Path, PathBuf};

use dris_core::simulate::{PointStats, SweepReport};

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("plot data line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub const CSV_HEADER: [&str; 9] = [
    "scheme",
    "inr_db",
    "axis",
    "axis_value",
    "mean_rate",
    "std_err",
    "trials",
    "mean_iters",
    "bottleneck",
];

fn bottleneck_field(p: &PointStats) -> String {
    p.bottleneck
        .iter()
        .map(|(hop, frac)| format!("{hop}:{frac}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Writes one row per (curve, axis point) to any writer.
pub fn write_csv<W: Write>(report: &SweepReport, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let axis = report.config.axis.name();
    for curve in &report.curves {
        let inr = curve.key.inr_db.map(|v| v.to_string()).unwrap_or_default();
        for p in &curve.points {
            w.write_record([
                curve.key.scheme.as_str().to_string(),
                inr.clone(),
                axis.to_string(),
                p.axis_value.to_string(),
                p.mean_rate.to_string(),
                p.std_err.to_string(),
                p.trials.to_string(),
                p.mean_iters.to_string(),
                bottleneck_field(p),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(report: &SweepReport, path: &Path) -> Result<(), OutputError> {
    let file = std::fs::File::create(path).map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(report, std::io::BufWriter::new(file)).map_err(|source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// One plotted curve: `(x, y, yerr)` rows under a label.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64, f64)>,
}

/// Series blocks separated by two blank lines, so `index N` in gnuplot
/// selects curve N.
pub fn render_plot_data(report: &SweepReport) -> String {
    let mut out = String::new();
    let axis = report.config.axis.name();
    for (i, curve) in report.curves.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        out.push_str(&format!("# {}\n# {axis} mean_rate std_err\n", curve.key.label()));
        for p in &curve.points {
            out.push_str(&format!("{} {} {}\n", p.axis_value, p.mean_rate, p.std_err));
        }
    }
    out
}

pub fn emit_plot_data(report: &SweepReport, path: &Path) -> Result<(), OutputError> {
    std::fs::write(path, render_plot_data(report)).map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads back the output of [`render_plot_data`].
pub fn parse_plot_data(text: &str) -> Result<Vec<PlotSeries>, OutputError> {
    let mut series: Vec<PlotSeries> = Vec::new();
    let mut in_header = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            in_header = false;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            // The first comment of a block is the label, the second the column names.
            if !in_header {
                series.push(PlotSeries {
                    label: comment.trim().to_string(),
                    points: Vec::new(),
                });
                in_header = true;
            }
            continue;
        }
        in_header = false;
        let err = |msg: String| OutputError::Parse { line: line_no, msg };
        let current = series
            .last_mut()
            .ok_or_else(|| err("data before any series label".into()))?;
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(format!("bad number `{t}`"))))
            .collect::<Result<_, _>>()?;
        match nums[..] {
            [x, y, e] => current.points.push((x, y, e)),
            _ => return Err(err(format!("expected 3 columns, got {}", nums.len()))),
        }
    }
    Ok(series)
}
