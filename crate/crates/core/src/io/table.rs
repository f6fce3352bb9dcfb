//! CSV tables with fixed column schemas, and JSON summaries.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always produce equal bytes; missing values are empty cells.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::dichotomy::{AppendixScan, DichotomyReport, EquivalenceAudit, KGapAudit};
use crate::error::{NlkgError, Result};
use crate::evolution::{DiagnosticsRow, RunRecord};
use crate::functionals::{Landscape, Verdict};
use crate::ground_state::KEntry;

/// Time series of an evolution run.
pub const RECORD_COLUMNS: &[&str] = &["t", "E", "EQ", "y", "ydot", "yddot", "sup", "K10", "Kd2", "P1", "P2", "P3"];
/// Box diagnostics over time.
pub const DIAGNOSTICS_COLUMNS: &[&str] = &["t", "P1", "P2", "P3", "XR1", "XR2", "XR3", "VR", "ER"];
/// K at the ground state over the sampled pairs.
pub const KTABLE_COLUMNS: &[&str] = &["alpha", "beta", "mu_bar", "K", "KQ", "ratio"];
/// One verdict per pair.
pub const CLASSIFY_COLUMNS: &[&str] = &["alpha", "beta", "E", "m", "K", "label"];
/// One row per datum of a sweep.
pub const DICHOTOMY_COLUMNS: &[&str] = &[
    "name",
    "E",
    "EQ",
    "K_min",
    "K_max",
    "predicted",
    "outcome",
    "agrees",
    "excluded",
    "parameter_violation",
    "control",
    "blowup_delta",
    "max_increment",
    "t_end",
];
/// One row per field and pair of the K-gap audit.
pub const KGAP_COLUMNS: &[&str] = &["field", "alpha", "beta", "J", "K", "KQ", "margin"];
/// One row per state of the free-energy equivalence audit.
pub const EQUIVALENCE_COLUMNS: &[&str] = &["index", "K10", "lower", "upper"];
/// One row per member of an unboundedness family.
pub const APPENDIX_COLUMNS: &[&str] = &["step", "nu", "lambda", "xi", "J", "K"];
/// One row per λ of a scaling landscape.
pub const LANDSCAPE_COLUMNS: &[&str] = &["lambda", "J", "K", "F", "KQ"];

/// Every table written by the tools, by name.
pub const SCHEMAS: &[(&str, &[&str])] = &[
    ("record", RECORD_COLUMNS),
    ("diagnostics", DIAGNOSTICS_COLUMNS),
    ("k-table", KTABLE_COLUMNS),
    ("classify", CLASSIFY_COLUMNS),
    ("dichotomy", DICHOTOMY_COLUMNS),
    ("k-gap", KGAP_COLUMNS),
    ("equivalence", EQUIVALENCE_COLUMNS),
    ("appendix", APPENDIX_COLUMNS),
    ("landscape", LANDSCAPE_COLUMNS),
];

/// A header and string rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

/// Shortest round-trip form of a float.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn padded(v: &[f64]) -> [String; 3] {
    [0, 1, 2].map(|i| num(v.get(i).copied().unwrap_or(0.0)))
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| NlkgError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| NlkgError::Io(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = self.to_csv_string()?;
        std::fs::write(path, text).map_err(|e| NlkgError::Io(format!("{}: {e}", path.display())))
    }

    pub fn record(record: &RunRecord) -> Self {
        let mut t = Self::new(RECORD_COLUMNS);
        for s in &record.samples {
            let p = padded(&s.momentum);
            let mut row = vec![s.t, s.energy, s.energy_quad, s.y, s.y_dot, s.y_ddot, s.sup, s.k10, s.kd2]
                .into_iter()
                .map(num)
                .collect::<Vec<_>>();
            row.extend(p);
            t.push(row);
        }
        t
    }

    pub fn diagnostics(rows: &[DiagnosticsRow]) -> Self {
        let mut t = Self::new(DIAGNOSTICS_COLUMNS);
        for r in rows {
            let mut row = vec![num(r.t)];
            row.extend(padded(&r.momentum));
            row.extend(padded(&r.center));
            row.push(num(r.virial));
            row.push(num(r.exterior));
            t.push(row);
        }
        t
    }

    pub fn k_table(entries: &[KEntry], d: usize) -> Self {
        let mut t = Self::new(KTABLE_COLUMNS);
        for e in entries {
            t.push(vec![
                num(e.pair.alpha),
                num(e.pair.beta),
                num(e.pair.mu_bar(d)),
                num(e.k),
                num(e.k_quad),
                num(e.relative()),
            ]);
        }
        t
    }

    pub fn classify(verdicts: &[Verdict]) -> Self {
        let mut t = Self::new(CLASSIFY_COLUMNS);
        for v in verdicts {
            t.push(vec![
                num(v.pair.alpha),
                num(v.pair.beta),
                num(v.energy),
                num(v.m),
                num(v.k),
                v.label.as_str().to_string(),
            ]);
        }
        t
    }

    pub fn dichotomy(report: &DichotomyReport) -> Self {
        let mut t = Self::new(DICHOTOMY_COLUMNS);
        for r in &report.rows {
            let k_min = r.k.iter().copied().fold(f64::INFINITY, f64::min);
            let k_max = r.k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let max_inc = r.dispersal.as_ref().map(|c| c.increments.iter().copied().fold(0.0, f64::max));
            t.push(vec![
                r.name.clone(),
                num(r.energy),
                num(r.energy_quad),
                num(k_min),
                num(k_max),
                r.predicted.map(|l| l.as_str().to_string()).unwrap_or_else(|| "Mixed".into()),
                r.outcome.as_str().to_string(),
                r.agrees.to_string(),
                r.excluded.to_string(),
                r.parameter_violation.to_string(),
                r.control.to_string(),
                opt(r.blowup.map(|b| b.delta)),
                opt(max_inc),
                num(r.t_end),
            ]);
        }
        t
    }

    pub fn k_gap(audit: &KGapAudit) -> Self {
        let mut t = Self::new(KGAP_COLUMNS);
        for r in &audit.rows {
            t.push(vec![
                r.field.to_string(),
                num(r.pair.alpha),
                num(r.pair.beta),
                num(r.j),
                num(r.k),
                num(r.k_quad),
                num(r.margin),
            ]);
        }
        t
    }

    pub fn equivalence(audit: &EquivalenceAudit) -> Self {
        let mut t = Self::new(EQUIVALENCE_COLUMNS);
        for r in &audit.rows {
            t.push(vec![r.index.to_string(), num(r.k10), opt(r.lower), opt(r.upper)]);
        }
        t
    }

    pub fn appendix(scan: &AppendixScan) -> Self {
        let mut t = Self::new(APPENDIX_COLUMNS);
        for r in &scan.rows {
            t.push(vec![r.step.to_string(), num(r.nu), num(r.lambda), num(r.xi), num(r.j), num(r.k)]);
        }
        t
    }

    pub fn landscape(l: &Landscape) -> Self {
        let mut t = Self::new(LANDSCAPE_COLUMNS);
        for r in &l.rows {
            t.push(vec![num(r.lambda), num(r.j), num(r.k), num(r.f), num(r.k_quad)]);
        }
        t
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = to_json_string(value)?;
    let file = File::create(path).map_err(|e| NlkgError::Io(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| NlkgError::Io(format!("{}: {e}", path.display())))
}
