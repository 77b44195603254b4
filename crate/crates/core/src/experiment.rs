//! Batch runs over scenarios, methods and densities, plus report output.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::baseline::ywcc16;
use crate::conic::EllipseAffine;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pipeline::{bound_until_converged, RefineOptions};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Proposed,
    Ywcc16,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Proposed => "proposed",
            Method::Ywcc16 => "ywcc16",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "proposed" => Ok(Method::Proposed),
            "ywcc16" => Ok(Method::Ywcc16),
            other => Err(Error::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub scenario: String,
    pub method: Method,
    pub m: usize,
    /// `None` for degenerate cells.
    pub area: Option<f64>,
    pub vertices: usize,
    pub repairs: usize,
    pub degenerate: bool,
    pub ms: f64,
    pub ellipse: Option<EllipseAffine>,
    /// Why the cell is degenerate, if it is.
    pub note: Option<String>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    scenario: &'a str,
    method: Method,
    m: usize,
    area: Option<f64>,
    vertices: usize,
    repairs: usize,
    degenerate: bool,
    ms: String,
}

/// Runs one cell. The proposed method runs a single pass at density `m`.
pub fn run_cell(ellipses: &[EllipseAffine], scenario: &str, method: Method, m: usize, eps: f64) -> ExperimentRecord {
    let start = Instant::now();
    let mut rec = ExperimentRecord {
        scenario: scenario.to_string(),
        method,
        m,
        area: None,
        vertices: 0,
        repairs: 0,
        degenerate: true,
        ms: 0.0,
        ellipse: None,
        note: None,
    };
    match method {
        Method::Proposed => {
            let opts = RefineOptions {
                m0: m,
                eps,
                k_max: 1,
                exec: Execution::Sequential,
                ..RefineOptions::default()
            };
            match bound_until_converged(ellipses, &opts) {
                Ok(r) => {
                    rec.area = Some(r.area());
                    rec.vertices = r.polygon.as_ref().map_or(0, |p| p.len());
                    rec.repairs = r.repairs;
                    rec.degenerate = false;
                    rec.ellipse = Some(r.ellipse);
                }
                Err(e) => rec.note = Some(e.to_string()),
            }
        }
        Method::Ywcc16 => match ywcc16(ellipses, m, eps) {
            Ok(r) => match (r.ellipse(), r.polygon()) {
                (Some(e), Some(p)) => {
                    rec.area = Some(e.area());
                    rec.vertices = p.len();
                    rec.degenerate = false;
                    rec.ellipse = Some(*e);
                }
                _ => {
                    if let crate::baseline::BaselineOutcome::Degenerate(d) = &r.outcome {
                        rec.note = Some(d.to_string());
                    }
                }
            },
            Err(e) => rec.note = Some(e.to_string()),
        },
    }
    rec.ms = start.elapsed().as_secs_f64() * 1e3;
    rec
}

/// Runs every (scenario, method, m) cell. Records come back ordered by
/// scenario, then method (in the order given), then m; failures become
/// degenerate records.
pub fn run_experiment(
    scenarios: &[Scenario],
    methods: &[Method],
    m_values: &[usize],
    eps: f64,
    exec: Execution,
) -> Vec<ExperimentRecord> {
    let parsed: Vec<std::result::Result<Vec<EllipseAffine>, String>> = scenarios
        .iter()
        .map(|s| s.affine().map_err(|e| e.to_string()))
        .collect();
    let cells: Vec<(usize, Method, usize)> = (0..scenarios.len())
        .flat_map(|s| methods.iter().flat_map(move |&me| m_values.iter().map(move |&m| (s, me, m))))
        .collect();
    exec.map(&cells, |&(s, method, m)| match &parsed[s] {
        Ok(e) => run_cell(e, &scenarios[s].id, method, m, eps),
        Err(msg) => ExperimentRecord {
            scenario: scenarios[s].id.clone(),
            method,
            m,
            area: None,
            vertices: 0,
            repairs: 0,
            degenerate: true,
            ms: 0.0,
            ellipse: None,
            note: Some(msg.clone()),
        },
    })
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        w.write_record(["scenario", "method", "m", "area", "vertices", "repairs", "degenerate", "ms"])
            .expect("in-memory write");
    }
    for r in records {
        w.serialize(CsvRow {
            scenario: &r.scenario,
            method: r.method,
            m: r.m,
            area: r.area,
            vertices: r.vertices,
            repairs: r.repairs,
            degenerate: r.degenerate,
            ms: format!("{:.3}", r.ms),
        })
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: Method,
    pub m: usize,
    pub runs: usize,
    pub degenerate: usize,
    pub median_area: Option<f64>,
    pub median_ms: Option<f64>,
    pub log2_m: f64,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Median area and time per (method, m), over non-degenerate cells.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Method, usize), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.method, r.m)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((method, m), rs)| {
            let mut areas: Vec<f64> = rs.iter().filter_map(|r| r.area).collect();
            let mut times: Vec<f64> = rs.iter().filter(|r| !r.degenerate).map(|r| r.ms).collect();
            SummaryRow {
                method,
                m,
                runs: rs.len(),
                degenerate: rs.iter().filter(|r| r.degenerate).count(),
                median_area: median(&mut areas),
                median_ms: median(&mut times),
                log2_m: (m as f64).log2(),
            }
        })
        .collect()
}

/// Path of the JSON summary written next to a CSV report.
pub fn summary_path(report: &Path) -> std::path::PathBuf {
    report.with_extension("summary.json")
}

/// Writes the CSV report and its JSON summary.
pub fn emit_report(records: &[ExperimentRecord], path: &Path) -> std::io::Result<()> {
    std::fs::write(path, records_to_csv(records))?;
    let summary = serde_json::to_string_pretty(&summarize(records)).expect("summary serializes");
    std::fs::write(summary_path(path), summary + "\n")
}
