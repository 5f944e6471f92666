//! Result files: per-replication records (CSV or JSON), summary JSON, and
//! graph and crossing dumps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use planecross_core::crossings::CrossingSet;
use planecross_core::rgg::GeometricGraph;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::experiments::{
    DistributionRecord, DistributionReport, ExistenceRecord, ExistenceReport, FindPlaneRecord,
    FindPlaneReport, TwoPlaneRecord, TwoPlaneReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(format!(
                "unknown format {other:?} (expected csv, json or text)"
            )),
        }
    }
}

/// A row type with a fixed CSV header, equal to its serialized field names.
pub trait Record: Serialize {
    const HEADER: &'static [&'static str];
}

/// Writes records as CSV. The header is written even when there are no
/// records.
pub fn write_csv<T: Record, W: Write>(records: &[T], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(T::HEADER).map_err(csv_to_io)?;
    for r in records {
        w.serialize(r).map_err(csv_to_io)?;
    }
    w.flush()
}

/// Writes records as a JSON array of objects, one per line.
pub fn write_json_records<T: Serialize, W: Write>(records: &[T], mut out: W) -> io::Result<()> {
    out.write_all(b"[")?;
    for (i, r) in records.iter().enumerate() {
        out.write_all(if i == 0 { b"\n" } else { b",\n" })?;
        serde_json::to_writer(&mut out, r)?;
    }
    out.write_all(b"\n]\n")
}

fn csv_to_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// Summary of a suite run, written next to the records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub suite: &'static str,
    pub config_echo: BTreeMap<String, String>,
    pub radius: f64,
    #[serde(rename = "M_theory")]
    pub m_theory: f64,
    /// Mean from the exact crossing kernel; see the README.
    #[serde(rename = "M_kernel")]
    pub m_kernel: f64,
    pub estimates: BTreeMap<String, f64>,
    pub ci_halfwidths: BTreeMap<String, f64>,
    pub distances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub series: BTreeMap<String, Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn config_echo(cfg: &ExperimentConfig) -> BTreeMap<String, String> {
    cfg.to_key_values()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn summary(
    suite: &'static str,
    cfg: &ExperimentConfig,
    radius: f64,
    m_theory: f64,
    m_kernel: f64,
) -> Summary {
    Summary {
        suite,
        config_echo: config_echo(cfg),
        radius,
        m_theory,
        m_kernel,
        estimates: BTreeMap::new(),
        ci_halfwidths: BTreeMap::new(),
        distances: BTreeMap::new(),
        series: BTreeMap::new(),
        warnings: Vec::new(),
    }
}

fn map<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// The result of any suite.
#[derive(Debug, Clone, PartialEq)]
pub enum SuiteReport {
    Distribution(DistributionReport),
    TwoPlane(TwoPlaneReport),
    FindPlane(FindPlaneReport),
    Existence(ExistenceReport),
}

impl SuiteReport {
    pub fn suite(&self) -> &'static str {
        match self {
            SuiteReport::Distribution(_) => "distribution",
            SuiteReport::TwoPlane(_) => "two-plane",
            SuiteReport::FindPlane(_) => "find-plane",
            SuiteReport::Existence(_) => "existence-scan",
        }
    }

    pub fn summary(&self, cfg: &ExperimentConfig) -> Summary {
        let suite = self.suite();
        match self {
            SuiteReport::Distribution(r) => {
                let mut s = summary(suite, cfg, r.radius, r.theory.mean, r.kernel.mean);
                s.estimates = map([("mean", r.mean)]);
                s.ci_halfwidths = map([("mean", r.halfwidth)]);
                s.distances = map([
                    ("tv_theory", r.theory.tv),
                    ("w1_theory", r.theory.w1),
                    ("tv_kernel", r.kernel.tv),
                    ("w1_kernel", r.kernel.w1),
                ]);
                s.series.insert("pmf".into(), r.pmf.dense());
                s
            }
            SuiteReport::TwoPlane(r) => {
                let mut s = summary(suite, cfg, r.radius, r.m_theory, r.m_kernel);
                s.estimates = map([
                    ("mean_x", r.mean_x),
                    ("mean_y", r.mean_y),
                    ("variance_x", r.variance_x),
                    ("covariance", r.covariance),
                    ("separation", r.separation),
                ]);
                if let Some(a) = r.alpha {
                    s.estimates.insert("alpha".into(), a);
                }
                for b in &r.bound_terms {
                    s.estimates.insert(format!("bound {}", b.label), b.value);
                }
                s.ci_halfwidths = map([("covariance", r.halfwidth)]);
                s
            }
            SuiteReport::FindPlane(r) => {
                let mut s = summary(suite, cfg, r.radius, r.m_theory, r.m_kernel);
                s.estimates = map([("p_first_plane", r.empirical_cdf[0])]);
                s.distances = map([
                    ("max_cdf_deviation_theory", r.max_deviation()),
                    ("max_cdf_deviation_kernel", r.max_deviation_kernel()),
                ]);
                s.series
                    .insert("empirical_cdf".into(), r.empirical_cdf.clone());
                s.series
                    .insert("predicted_cdf".into(), r.predicted_cdf.clone());
                s.series.insert(
                    "predicted_cdf_kernel".into(),
                    r.predicted_cdf_kernel.clone(),
                );
                s
            }
            SuiteReport::Existence(r) => {
                let mut s = summary(suite, cfg, r.radius, r.m_theory, r.m_kernel);
                s.estimates = map([
                    ("existence_fraction", r.existence_fraction),
                    ("measure_proxy", r.measure_proxy),
                ]);
                if let Some(c) = r.exponent {
                    s.estimates.insert("log_exponent".into(), c);
                }
                s.ci_halfwidths = map([
                    ("existence_fraction", r.existence_halfwidth),
                    ("measure_proxy", r.measure_halfwidth),
                ]);
                s.warnings = r.warnings.clone();
                s
            }
        }
    }

    pub fn warnings(&self) -> &[String] {
        match self {
            SuiteReport::Existence(r) => &r.warnings,
            _ => &[],
        }
    }

    pub fn header(&self) -> &'static [&'static str] {
        match self {
            SuiteReport::Distribution(_) => DistributionRecord::HEADER,
            SuiteReport::TwoPlane(_) => TwoPlaneRecord::HEADER,
            SuiteReport::FindPlane(_) => FindPlaneRecord::HEADER,
            SuiteReport::Existence(_) => ExistenceRecord::HEADER,
        }
    }

    pub fn write_records<W: Write>(&self, format: Format, out: W) -> io::Result<()> {
        macro_rules! emit {
            ($records:expr) => {
                match format {
                    Format::Json => write_json_records($records, out),
                    _ => write_csv($records, out),
                }
            };
        }
        match self {
            SuiteReport::Distribution(r) => emit!(&r.records),
            SuiteReport::TwoPlane(r) => emit!(&r.records),
            SuiteReport::FindPlane(r) => emit!(&r.records),
            SuiteReport::Existence(r) => emit!(&r.records),
        }
    }
}

/// Human-readable rendering of a summary.
pub fn render_text(s: &Summary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "suite      {}", s.suite);
    let _ = writeln!(out, "radius     {:.6e}", s.radius);
    let _ = writeln!(out, "M_theory   {:.6}", s.m_theory);
    let _ = writeln!(out, "M_kernel   {:.6}", s.m_kernel);
    for (k, v) in &s.estimates {
        match s.ci_halfwidths.get(k) {
            Some(h) => {
                let _ = writeln!(out, "{k:<28} {v:.6} ± {h:.6}");
            }
            None => {
                let _ = writeln!(out, "{k:<28} {v:.6}");
            }
        }
    }
    for (k, v) in &s.distances {
        let _ = writeln!(out, "{k:<28} {v:.6}");
    }
    for (k, v) in &s.series {
        let cells: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
        let _ = writeln!(out, "{k:<28} {}", cells.join(" "));
    }
    for w in &s.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

fn create(path: &Path) -> Result<io::BufWriter<fs::File>, RunError> {
    fs::File::create(path)
        .map(io::BufWriter::new)
        .map_err(|e| RunError::io(path, e))
}

/// Writes `<suite>.csv` or `<suite>.json` and `<suite>_summary.json` into
/// `dir`, creating it if needed. Returns the paths written.
pub fn write_outputs(
    dir: &Path,
    report: &SuiteReport,
    summary: &Summary,
    format: Format,
) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    let mut written = Vec::new();
    let suite = report.suite();
    if format != Format::Text {
        let ext = if format == Format::Json {
            "json"
        } else {
            "csv"
        };
        let path = dir.join(format!("{suite}.{ext}"));
        let mut w = create(&path)?;
        report
            .write_records(format, &mut w)
            .and_then(|_| w.flush())
            .map_err(|e| RunError::io(&path, e))?;
        written.push(path);
    }
    let path = dir.join(format!("{suite}_summary.json"));
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, summary)
        .map_err(io::Error::from)
        .and_then(|_| w.write_all(b"\n"))
        .and_then(|_| w.flush())
        .map_err(|e| RunError::io(&path, e))?;
    written.push(path);
    Ok(written)
}

macro_rules! record {
    ($ty:ty: $($col:literal),+) => {
        impl Record for $ty {
            const HEADER: &'static [&'static str] = &[$($col),+];
        }
    };
}

record!(DistributionRecord: "rep", "seed", "n_vertices", "n_edges", "n_crossings", "degenerate_hits");
record!(TwoPlaneRecord: "rep", "seed", "n_vertices", "n_edges", "n_crossings_x", "n_crossings_y", "degenerate_hits");
record!(FindPlaneRecord: "rep", "seed", "n_vertices", "n_edges", "first_success", "censored");
record!(ExistenceRecord: "rep", "seed", "n_vertices", "n_edges", "zero_planes", "grid_planes", "exists", "certified");
record!(VertexRow: "vx", "vy", "vz");
record!(EdgeRow: "i", "j");
record!(CrossingRow: "edge_a", "edge_b", "u", "v");

#[derive(Serialize)]
struct VertexRow {
    vx: f64,
    vy: f64,
    vz: f64,
}

#[derive(Serialize)]
struct EdgeRow {
    i: usize,
    j: usize,
}

#[derive(Serialize)]
struct CrossingRow {
    edge_a: usize,
    edge_b: usize,
    u: f64,
    v: f64,
}

pub fn write_vertices<W: Write>(graph: &GeometricGraph, out: W) -> io::Result<()> {
    let rows: Vec<VertexRow> = graph
        .points()
        .iter()
        .map(|p| VertexRow {
            vx: p.x,
            vy: p.y,
            vz: p.z,
        })
        .collect();
    write_csv(&rows, out)
}

pub fn write_edges<W: Write>(graph: &GeometricGraph, out: W) -> io::Result<()> {
    let rows: Vec<EdgeRow> = graph
        .edges()
        .iter()
        .map(|&(i, j)| EdgeRow { i, j })
        .collect();
    write_csv(&rows, out)
}

pub fn write_crossings<W: Write>(set: &CrossingSet, out: W) -> io::Result<()> {
    let rows: Vec<CrossingRow> = set
        .crossings()
        .iter()
        .map(|c| CrossingRow {
            edge_a: c.edge_a,
            edge_b: c.edge_b,
            u: c.location.u,
            v: c.location.v,
        })
        .collect();
    write_csv(&rows, out)
}

/// Writes `vertices.csv`, `edges.csv` and `crossings.csv` into `dir`.
pub fn write_dump(
    dir: &Path,
    graph: &GeometricGraph,
    set: &CrossingSet,
) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    let vertices = dir.join("vertices.csv");
    let edges = dir.join("edges.csv");
    let crossings = dir.join("crossings.csv");
    let finish = |path: &Path, res: io::Result<io::BufWriter<fs::File>>| {
        res.and_then(|mut w| w.flush())
            .map_err(|e| RunError::io(path, e))
    };
    let mut w = create(&vertices)?;
    finish(&vertices, write_vertices(graph, &mut w).map(|_| w))?;
    let mut w = create(&edges)?;
    finish(&edges, write_edges(graph, &mut w).map(|_| w))?;
    let mut w = create(&crossings)?;
    finish(&crossings, write_crossings(set, &mut w).map(|_| w))?;
    Ok(vec![vertices, edges, crossings])
}
