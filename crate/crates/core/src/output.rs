//! CSV and JSON writers for plot data.
//!
//! CSV files are comma separated with a header row and LF line endings;
//! powers appear both linear and in dB. JSON writes complex numbers as
//! `{"re": .., "im": ..}` and diverging metrics as `"inf"`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::Result;
use crate::network::FrequencyResponse;
use crate::photonic::{power_to_db, ComplexAmplitude};
use crate::scaling::{CrossoverReport, ScalingRow};
use crate::sensitivity::{ExtinctionCurve, Metric, SweepResult};

/// A rectangular table of already formatted cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn db(p: f64) -> String {
    power_to_db(p).to_string()
}

fn metric_db(m: Metric) -> String {
    match m {
        Metric::Unbounded => "inf".into(),
        other => other.to_db().to_string(),
    }
}

/// Serialization form of a complex amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexAmplitude> for JsonComplex {
    fn from(c: ComplexAmplitude) -> Self {
        Self { re: c.re, im: c.im }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn target(dir: &Path, stem: &str, format: OutputFormat) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let ext = match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    Ok(dir.join(format!("{stem}.{ext}")))
}

pub fn response_table(resp: &FrequencyResponse, bins: &[usize]) -> Table {
    let mut header = vec!["frequency_hz".to_string()];
    for b in bins {
        header.push(format!("x{b}_power"));
        header.push(format!("x{b}_db"));
    }
    let mut t = Table::new(header);
    for (i, f) in resp.frequencies.iter().enumerate() {
        let mut row = vec![f.to_string()];
        for &b in bins {
            let p = resp.per_port[b][i].norm_sqr();
            row.push(p.to_string());
            row.push(db(p));
        }
        t.rows.push(row);
    }
    t
}

#[derive(Serialize)]
struct JsonPort {
    bin: usize,
    physical_port: usize,
    response: Vec<JsonComplex>,
    power: Vec<f64>,
}

#[derive(Serialize)]
struct JsonResponse<'a> {
    frequencies_hz: &'a [f64],
    ports: Vec<JsonPort>,
}

/// Writes `response.{csv,json}` for the given bins and returns its path.
pub fn write_response(
    dir: &Path,
    format: OutputFormat,
    resp: &FrequencyResponse,
    bins: &[usize],
    port_map: &[usize],
) -> Result<PathBuf> {
    let path = target(dir, "response", format)?;
    match format {
        OutputFormat::Csv => response_table(resp, bins).write_csv(&path)?,
        OutputFormat::Json => {
            let ports = bins
                .iter()
                .map(|&b| JsonPort {
                    bin: b,
                    physical_port: port_map.iter().position(|&k| k == b).unwrap_or(b),
                    response: resp.per_port[b].iter().map(|&h| h.into()).collect(),
                    power: resp.power(b),
                })
                .collect();
            write_json(
                &path,
                &JsonResponse {
                    frequencies_hz: &resp.frequencies,
                    ports,
                },
            )?;
        }
    }
    Ok(path)
}

pub fn sweep_table(r: &SweepResult) -> Table {
    let n = r.baseline_power.len();
    let mut header = vec!["value".to_string()];
    for k in 0..n {
        header.extend([
            format!("x{k}_power"),
            format!("x{k}_db"),
            format!("x{k}_degradation"),
            format!("x{k}_snr"),
        ]);
    }
    header.extend(["mismatch".into(), "fom".into(), "fom_db".into()]);
    let mut t = Table::new(header);
    for ((v, p), m) in r.parameter_values.iter().zip(&r.power).zip(&r.metrics) {
        let mut row = vec![v.to_string()];
        for ((pk, dk), sk) in p.iter().zip(&m.degradation).zip(&m.snr) {
            row.extend([pk.to_string(), db(*pk), dk.to_string(), sk.to_string()]);
        }
        row.extend([m.mismatch.to_string(), m.fom.to_string(), metric_db(m.fom)]);
        t.rows.push(row);
    }
    t
}

/// Heater tolerance attached to a phase sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToleranceSummary {
    pub threshold_db: f64,
    pub target_port: usize,
    pub probe_hz: f64,
    pub tolerance_rad: f64,
    pub tolerance_k: f64,
}

#[derive(Serialize)]
struct JsonSweep<'a> {
    #[serde(flatten)]
    result: &'a SweepResult,
    tolerance: Option<&'a ToleranceSummary>,
}

/// Writes `sweep_<name>` and, for CSV, `sweep_<name>_summary.json` when a
/// tolerance is given. Returns the written paths.
pub fn write_sweep(
    dir: &Path,
    format: OutputFormat,
    r: &SweepResult,
    tolerance: Option<&ToleranceSummary>,
) -> Result<Vec<PathBuf>> {
    let path = target(dir, &format!("sweep_{}", r.name), format)?;
    let mut written = vec![path.clone()];
    match format {
        OutputFormat::Csv => {
            sweep_table(r).write_csv(&path)?;
            if let Some(t) = tolerance {
                let summary = dir.join(format!("sweep_{}_summary.json", r.name));
                write_json(&summary, t)?;
                written.push(summary);
            }
        }
        OutputFormat::Json => write_json(
            &path,
            &JsonSweep {
                result: r,
                tolerance,
            },
        )?,
    }
    Ok(written)
}

/// Extinction ratios of the network, plus the single-cell simulation and
/// its closed form at the first-stage loss.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtinctionReport {
    pub name: String,
    #[serde(flatten)]
    pub curve: ExtinctionCurve,
    pub single_cell: Vec<Metric>,
    pub analytic: Vec<Metric>,
}

pub fn extinction_table(r: &ExtinctionReport) -> Table {
    let n = r.curve.per_port.first().map_or(0, Vec::len);
    let mut header = vec!["loss_db".to_string()];
    for k in 0..n {
        header.push(format!("x{k}_er"));
        header.push(format!("x{k}_er_db"));
    }
    header.extend([
        "single_cell_er".into(),
        "single_cell_er_db".into(),
        "analytic_er".into(),
        "analytic_er_db".into(),
    ]);
    let mut t = Table::new(header);
    for (i, loss) in r.curve.losses_db.iter().enumerate() {
        let mut row = vec![loss.to_string()];
        for &m in &r.curve.per_port[i] {
            row.push(m.to_string());
            row.push(metric_db(m));
        }
        for m in [r.single_cell[i], r.analytic[i]] {
            row.push(m.to_string());
            row.push(metric_db(m));
        }
        t.rows.push(row);
    }
    t
}

pub fn write_extinction(dir: &Path, format: OutputFormat, r: &ExtinctionReport) -> Result<PathBuf> {
    let path = target(dir, &format!("sweep_{}", r.name), format)?;
    match format {
        OutputFormat::Csv => extinction_table(r).write_csv(&path)?,
        OutputFormat::Json => write_json(&path, r)?,
    }
    Ok(path)
}

pub fn scaling_table(rows: &[ScalingRow]) -> Table {
    let header = [
        "n",
        "path_loss_db",
        "input_power_w",
        "area_mm2",
        "offt_fom",
        "gpu_fom",
        "ratio",
    ];
    let mut t = Table::new(header.iter().map(|s| s.to_string()).collect());
    for r in rows {
        t.rows.push(
            [
                r.n_points as f64,
                r.path_loss_db,
                r.input_power_w,
                r.area_mm2,
                r.offt_fom,
                r.gpu_fom,
                r.ratio,
            ]
            .iter()
            .map(f64::to_string)
            .collect(),
        );
    }
    t
}

/// Crossover and capacity figures that go with the scaling table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingSummary {
    pub crossover: CrossoverReport,
    /// Largest size in the table.
    pub n_max: usize,
    /// Crossover within the tabulated sizes.
    pub crossover_in_table: Option<usize>,
    pub capacity_single_bps: f64,
    pub capacity_all_bps: f64,
}

#[derive(Serialize)]
struct JsonScaling<'a> {
    rows: &'a [ScalingRow],
    summary: &'a ScalingSummary,
}

/// Writes `scaling.{csv,json}` and, for CSV, `scaling_summary.json`.
pub fn write_scaling(
    dir: &Path,
    format: OutputFormat,
    rows: &[ScalingRow],
    summary: &ScalingSummary,
) -> Result<Vec<PathBuf>> {
    let path = target(dir, "scaling", format)?;
    match format {
        OutputFormat::Csv => {
            scaling_table(rows).write_csv(&path)?;
            let extra = dir.join("scaling_summary.json");
            write_json(&extra, summary)?;
            Ok(vec![path, extra])
        }
        OutputFormat::Json => {
            write_json(&path, &JsonScaling { rows, summary })?;
            Ok(vec![path])
        }
    }
}
