//! CSV and JSON reports for sweeps and the ensemble chain.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64`. Skipped sweep points leave their numeric fields
//! empty and carry `skipped: <reason>` in the status column. CSV summaries are
//! appended as `# key=value` comment lines.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{MiChain, Sweep, SweepPoint, SweepSummary};
use crate::model::{Outcome, OutcomeSpace};

pub const CSV_COLUMNS: [&str; 9] = [
    "x",
    "theta",
    "pmi",
    "bound",
    "slack",
    "boundary_term",
    "integral_term",
    "penalty_term",
    "status",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed report: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub x: String,
    pub theta: f64,
    pub pmi: Option<f64>,
    pub bound: Option<f64>,
    pub slack: Option<f64>,
    pub boundary_term: Option<f64>,
    pub integral_term: Option<f64>,
    pub penalty_term: Option<f64>,
    /// `ok`, or `skipped: <reason>`.
    pub status: String,
}

impl ReportRow {
    pub fn is_skipped(&self) -> bool {
        self.status.starts_with("skipped")
    }
}

/// Summary as written to reports; slack statistics are absent when nothing
/// was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub n_points: usize,
    pub n_evaluations: usize,
    pub skipped: usize,
    pub violations: usize,
    pub min_slack: Option<f64>,
    pub mean_slack: Option<f64>,
    pub tolerance: f64,
}

impl From<&SweepSummary> for ReportSummary {
    fn from(s: &SweepSummary) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        Self {
            n_points: s.n_points,
            n_evaluations: s.n_evaluations,
            skipped: s.skipped,
            violations: s.violations,
            min_slack: finite(s.min_slack),
            mean_slack: finite(s.mean_slack),
            tolerance: s.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scenario: String,
    pub bound: String,
    pub rows: Vec<ReportRow>,
    pub summary: ReportSummary,
}

impl SweepReport {
    pub fn new(scenario: &str, bound: &str, sweep: &Sweep, space: &OutcomeSpace) -> Self {
        let rows = sweep
            .points
            .iter()
            .map(|p| match p {
                SweepPoint::Evaluated(r) => ReportRow {
                    x: outcome_label(space, r.x),
                    theta: r.theta,
                    pmi: Some(r.pmi),
                    bound: Some(r.bound),
                    slack: Some(r.slack),
                    boundary_term: Some(r.components.boundary_term),
                    integral_term: Some(r.components.integral_term),
                    penalty_term: Some(r.components.penalty_term),
                    status: "ok".into(),
                },
                SweepPoint::Skipped { x, theta, reason } => ReportRow {
                    x: outcome_label(space, *x),
                    theta: *theta,
                    pmi: None,
                    bound: None,
                    slack: None,
                    boundary_term: None,
                    integral_term: None,
                    penalty_term: None,
                    status: format!("skipped: {reason}"),
                },
            })
            .collect();
        Self {
            scenario: scenario.into(),
            bound: bound.into(),
            rows,
            summary: ReportSummary::from(&sweep.summary),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), ReportError> {
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(CSV_COLUMNS)?;
            for row in &self.rows {
                let numbers = [
                    row.pmi,
                    row.bound,
                    row.slack,
                    row.boundary_term,
                    row.integral_term,
                    row.penalty_term,
                ];
                let mut record = vec![row.x.clone(), number(row.theta)];
                record.extend(numbers.iter().map(|v| v.map(number).unwrap_or_default()));
                record.push(row.status.clone());
                w.write_record(&record)?;
            }
            w.flush()?;
        }
        let s = &self.summary;
        let opt = |v: Option<f64>| v.map(number).unwrap_or_else(|| "none".into());
        writeln!(out, "# scenario={}", self.scenario)?;
        writeln!(out, "# bound={}", self.bound)?;
        writeln!(out, "# n_points={}", s.n_points)?;
        writeln!(out, "# n_evaluations={}", s.n_evaluations)?;
        writeln!(out, "# skipped={}", s.skipped)?;
        writeln!(out, "# violations={}", s.violations)?;
        writeln!(out, "# min_slack={}", opt(s.min_slack))?;
        writeln!(out, "# mean_slack={}", opt(s.mean_slack))?;
        writeln!(out, "# tolerance={}", number(s.tolerance))?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("report is utf-8")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Parses a CSV sweep report written by [`SweepReport::write_csv`].
pub fn parse_csv(text: &str) -> Result<SweepReport, ReportError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(ReportError::Malformed(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let optional = |i: usize| -> Result<Option<f64>, ReportError> {
            match field(i) {
                "" => Ok(None),
                s => parse_number(s).map(Some).ok_or_else(|| bad_number(line, i, s)),
            }
        };
        let theta = parse_number(field(1)).ok_or_else(|| bad_number(line, 1, field(1)))?;
        let row = ReportRow {
            x: field(0).to_string(),
            theta,
            pmi: optional(2)?,
            bound: optional(3)?,
            slack: optional(4)?,
            boundary_term: optional(5)?,
            integral_term: optional(6)?,
            penalty_term: optional(7)?,
            status: field(8).to_string(),
        };
        let complete = [
            row.pmi,
            row.bound,
            row.slack,
            row.boundary_term,
            row.integral_term,
            row.penalty_term,
        ]
        .iter()
        .all(Option::is_some);
        if complete == row.is_skipped() {
            return Err(ReportError::Malformed(format!(
                "row {line}: status does not match its values"
            )));
        }
        rows.push(row);
    }

    let mut footer = std::collections::BTreeMap::new();
    for line in text.lines().filter_map(|l| l.strip_prefix("# ")) {
        if let Some((k, v)) = line.split_once('=') {
            footer.insert(k.to_string(), v.to_string());
        }
    }
    let get = |k: &str| {
        footer
            .get(k)
            .cloned()
            .ok_or_else(|| ReportError::Malformed(format!("missing summary field {k}")))
    };
    let count = |k: &str| -> Result<usize, ReportError> {
        get(k)?
            .parse()
            .map_err(|_| ReportError::Malformed(format!("summary field {k} is not a count")))
    };
    let real = |k: &str| -> Result<Option<f64>, ReportError> {
        match get(k)?.as_str() {
            "none" => Ok(None),
            s => parse_number(s)
                .map(Some)
                .ok_or_else(|| ReportError::Malformed(format!("summary field {k} is not a number"))),
        }
    };
    let summary = ReportSummary {
        n_points: count("n_points")?,
        n_evaluations: count("n_evaluations")?,
        skipped: count("skipped")?,
        violations: count("violations")?,
        min_slack: real("min_slack")?,
        mean_slack: real("mean_slack")?,
        tolerance: real("tolerance")?.ok_or_else(|| ReportError::Malformed("tolerance is none".into()))?,
    };
    if summary.n_points != rows.len() {
        return Err(ReportError::Malformed(format!(
            "summary counts {} points but the report has {} rows",
            summary.n_points,
            rows.len()
        )));
    }
    Ok(SweepReport {
        scenario: get("scenario")?,
        bound: get("bound")?,
        rows,
        summary,
    })
}

/// Parses a JSON sweep report written by [`SweepReport::to_json`].
pub fn parse_json(text: &str) -> Result<SweepReport, ReportError> {
    let report: SweepReport = serde_json::from_str(text)?;
    if report.summary.n_points != report.rows.len() {
        return Err(ReportError::Malformed("summary point count does not match rows".into()));
    }
    Ok(report)
}

/// The ensemble chain with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub scenario: String,
    pub bound: String,
    pub mutual_information: f64,
    pub averaged_pointwise_bound: f64,
    pub mi_bound_average: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl ChainReport {
    pub fn new(scenario: &str, bound: &str, chain: &MiChain) -> Self {
        Self {
            scenario: scenario.into(),
            bound: bound.into(),
            mutual_information: chain.mutual_information,
            averaged_pointwise_bound: chain.averaged_pointwise_bound,
            mi_bound_average: chain.mi_bound_average,
            tolerance: chain.tolerance,
            holds: chain.holds(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,value\n");
        for (k, v) in [
            ("mutual_information", self.mutual_information),
            ("averaged_pointwise_bound", self.averaged_pointwise_bound),
            ("mi_bound_average", self.mi_bound_average),
            ("tolerance", self.tolerance),
        ] {
            s.push_str(&format!("{k},{}\n", number(v)));
        }
        s.push_str(&format!(
            "# scenario={}\n# bound={}\n# holds={}\n",
            self.scenario, self.bound, self.holds
        ));
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn outcome_label(space: &OutcomeSpace, x: Outcome) -> String {
    match x {
        Outcome::Value(v) => number(v),
        Outcome::Index(_) => space.label(x),
    }
}

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn bad_number(line: usize, column: usize, value: &str) -> ReportError {
    ReportError::Malformed(format!(
        "row {line}, column {}: {value:?} is not a finite number",
        CSV_COLUMNS[column]
    ))
}
