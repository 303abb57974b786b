//! Per-method score table in the column order of the published comparison.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{adjudicated_sets, score, AnnotationSet, BenchError, Policy, Scores, VerdictRecord, WispType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Column {
    Macro,
    Weighted,
    Composite,
    Pure,
    Prefix,
    Internal,
    LineBreaks,
    Vertical,
    OcrError,
}

impl Column {
    pub const ALL: [Column; 9] = [
        Column::Macro,
        Column::Weighted,
        Column::Composite,
        Column::Pure,
        Column::Prefix,
        Column::Internal,
        Column::LineBreaks,
        Column::Vertical,
        Column::OcrError,
    ];

    pub fn header(self) -> &'static str {
        match self {
            Column::Macro => "Macro",
            Column::Weighted => "Weighted",
            Column::Composite => "Composite",
            Column::Pure => "Pure",
            Column::Prefix => "PREFIX",
            Column::Internal => "INTERNAL",
            Column::LineBreaks => "LINE_BREAKS",
            Column::Vertical => "VERTICAL",
            Column::OcrError => "OCR-ERROR",
        }
    }

    fn lower_is_better(self) -> bool {
        self == Column::OcrError
    }
}

/// Exact value rounded half away from zero to two decimals.
pub fn fmt2(r: &BigRational) -> String {
    let cents = (r * BigInt::from(100)).round().to_integer();
    let sign = if cents.is_negative() { "-" } else { "" };
    let cents = cents.abs();
    let (whole, frac) = (&cents / 100, &cents % 100);
    format!("{sign}{whole}.{frac:0>2}")
}

fn to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method_id: String,
    pub records: usize,
    pub reliability: f64,
    /// Column values; `None` marks an absent column.
    pub values: BTreeMap<Column, Option<f64>>,
    /// Same values as exact fractions, e.g. "1291/25".
    pub exact: BTreeMap<Column, Option<String>>,
}

impl ReportRow {
    pub fn get(&self, c: Column) -> Option<f64> {
        self.values.get(&c).copied().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<ReportRow>,
    /// Methods within 0.1 of the best value, per column.
    pub best: BTreeMap<Column, Vec<String>>,
    pub warnings: Vec<String>,
}

fn column_values(s: &Scores) -> BTreeMap<Column, Option<BigRational>> {
    let t = |w: WispType| s.type_rates.get(&w).cloned().flatten();
    BTreeMap::from([
        (Column::Macro, Some(s.macro_score.clone())),
        (Column::Weighted, Some(s.weighted.clone())),
        (Column::Composite, Some(s.composite.clone())),
        (Column::Pure, s.pure.clone()),
        (Column::Prefix, t(WispType::Prefix)),
        (Column::Internal, t(WispType::Internal)),
        (Column::LineBreaks, t(WispType::LineBreaks)),
        (Column::Vertical, t(WispType::Vertical)),
        (Column::OcrError, Some(s.ocr_error_rate.clone())),
    ])
}

pub fn bench_report(sets: &BTreeMap<String, AnnotationSet>) -> Result<BenchReport, BenchError> {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (method, set) in sets {
        let s = score(set)?;
        let vals = column_values(&s);
        for (c, v) in &vals {
            if v.is_none() {
                let w = format!("{method}: no applicable annotations for {}; column left empty", c.header());
                log::warn!("{w}");
                warnings.push(w);
            }
        }
        rows.push(ReportRow {
            method_id: method.clone(),
            records: s.records,
            reliability: to_f64(&s.reliability),
            values: vals.iter().map(|(&c, v)| (c, v.as_ref().map(to_f64))).collect(),
            exact: vals.iter().map(|(&c, v)| (c, v.as_ref().map(|r| r.to_string()))).collect(),
        });
    }
    let mut best = BTreeMap::new();
    for c in Column::ALL {
        let present = rows.iter().filter_map(|r| r.get(c));
        let top = if c.lower_is_better() {
            present.fold(f64::INFINITY, f64::min)
        } else {
            present.fold(f64::NEG_INFINITY, f64::max)
        };
        if top.is_finite() {
            let winners = rows
                .iter()
                .filter(|r| r.get(c).is_some_and(|v| (v - top).abs() <= 0.1 + 1e-9))
                .map(|r| r.method_id.clone())
                .collect();
            best.insert(c, winners);
        }
    }
    Ok(BenchReport { rows, best, warnings })
}

/// Adjudicates raw verdicts and scores each method. Methods whose records
/// have no applicable answer are dropped with a warning; `NoRecords` if none
/// is left.
pub fn report_from_verdicts(records: &[VerdictRecord], policy: Policy) -> Result<BenchReport, BenchError> {
    let mut sets = adjudicated_sets(records, policy);
    let mut dropped = Vec::new();
    sets.retain(|method, set| {
        let keep = score(set).is_ok();
        if !keep {
            dropped.push(format!("{method}: no applicable answers; method left out"));
        }
        keep
    });
    if sets.is_empty() {
        return Err(BenchError::NoRecords);
    }
    let mut report = bench_report(&sets)?;
    for w in &dropped {
        log::warn!("{w}");
    }
    report.warnings.splice(0..0, dropped);
    Ok(report)
}

impl BenchReport {
    /// Fixed-width text table; best values carry a trailing `*`.
    pub fn to_table(&self) -> String {
        let name_w = self.rows.iter().map(|r| r.method_id.chars().count()).max().unwrap_or(6).max(6);
        let mut out = format!("{:<name_w$}", "Method");
        for c in Column::ALL {
            let _ = write!(out, "  {:>12}", c.header());
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{:<name_w$}", r.method_id);
            for c in Column::ALL {
                let cell = match r.get(c) {
                    None => "-".to_string(),
                    Some(v) => {
                        let star = self.best.get(&c).is_some_and(|b| b.contains(&r.method_id));
                        format!("{v:.2}{}", if star { "*" } else { "" })
                    }
                };
                let _ = write!(out, "  {cell:>12}");
            }
            out.push('\n');
        }
        out
    }
}
