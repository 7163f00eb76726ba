//! Evaluation reports as JSON, confusion matrices as CSV, and the per-language
//! F1 tables that `compare` reads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lidkit_core::eval::{EvalReport, GroupErrorReport, MacroAverage};
use serde_json::{json, Map, Value};

use crate::error::{LidError, Result};

pub const REPORT_FORMAT: &str = "lidkit-eval-report";
pub const REPORT_VERSION: u64 = 1;

fn average_name(average: MacroAverage) -> &'static str {
    match average {
        MacroAverage::GoldPresent => "gold_present",
        MacroAverage::AllLabels => "all_labels",
    }
}

fn group_json(group: &GroupErrorReport) -> Value {
    let members: Vec<Value> = group
        .members
        .iter()
        .map(|m| {
            json!({
                "code": m.code,
                "support": m.support,
                "correct": m.correct,
                "within_group": m.within_group,
                "others": m.others,
            })
        })
        .collect();
    json!({
        "group": group.group,
        "members": members,
        "within_share_of_errors": group.within_share_of_errors,
        "warnings": group.warnings,
    })
}

/// The report as a JSON value. Object keys are sorted, so rendering it is
/// deterministic.
pub fn report_json(report: &EvalReport, groups: &[GroupErrorReport]) -> Value {
    let mut per_class = Map::new();
    for (code, m) in &report.per_class {
        per_class.insert(
            code.clone(),
            json!({ "precision": m.precision, "recall": m.recall, "f1": m.f1, "support": m.support }),
        );
    }
    let h = &report.f1_histogram;
    let mut doc = json!({
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "accuracy": report.accuracy,
        "macro_f1": report.macro_f1,
        "average": average_name(report.average),
        "per_class": per_class,
        "f1_histogram": {
            "perfect": h.perfect,
            "from_95": h.from_95,
            "from_90": h.from_90,
            "below_90": h.below_90,
        },
        "confusion": {
            "labels": report.confusion.labels(),
            "cells": report.confusion.cells(),
        },
    });
    if !groups.is_empty() {
        doc["groups"] = Value::Array(groups.iter().map(group_json).collect());
    }
    doc
}

pub fn render_report(report: &EvalReport, groups: &[GroupErrorReport]) -> String {
    let mut text = serde_json::to_string_pretty(&report_json(report, groups))
        .expect("JSON values always render");
    text.push('\n');
    text
}

pub fn write_report(path: &Path, report: &EvalReport, groups: &[GroupErrorReport]) -> Result<()> {
    fs::write(path, render_report(report, groups)).map_err(|e| LidError::io(path, e))
}

/// Confusion matrix as CSV: a header row of predicted codes and one row per
/// gold code.
pub fn confusion_csv(report: &EvalReport) -> String {
    let labels = report.confusion.labels();
    let mut out = String::from("gold\\pred");
    for l in labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    for (gold, row) in labels.iter().zip(report.confusion.cells()) {
        out.push_str(gold);
        for c in row {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}

/// Per-language F1 from either a JSON report or `code<TAB>f1` rows.
pub fn parse_f1_table(text: &str) -> Result<BTreeMap<String, f64>> {
    if text.trim_start().starts_with('{') {
        return f1_from_json(text);
    }
    let mut out = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| LidError::Corpus {
            line: idx + 1,
            message,
        };
        let Some((code, f1)) = line.split_once('\t') else {
            return Err(bad("expected `code<TAB>f1`".into()));
        };
        if idx == 0 && f1.trim().parse::<f64>().is_err() {
            continue; // header row
        }
        let f1: f64 = f1
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad F1 value `{f1}`")))?;
        if !(0.0..=1.0).contains(&f1) {
            return Err(bad(format!("F1 {f1} is outside [0, 1]")));
        }
        if out.insert(code.trim().to_string(), f1).is_some() {
            return Err(bad(format!("`{code}` appears twice")));
        }
    }
    Ok(out)
}

fn f1_from_json(text: &str) -> Result<BTreeMap<String, f64>> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| LidError::Report(format!("invalid JSON: {e}")))?;
    if doc.get("format").and_then(Value::as_str) != Some(REPORT_FORMAT) {
        return Err(LidError::Report(format!("not a {REPORT_FORMAT} document")));
    }
    match doc.get("version").and_then(Value::as_u64) {
        Some(REPORT_VERSION) => {}
        v => {
            return Err(LidError::Report(format!(
                "unsupported report version {v:?}"
            )))
        }
    }
    let classes = doc
        .get("per_class")
        .and_then(Value::as_object)
        .ok_or_else(|| LidError::Report("missing per_class".into()))?;
    classes
        .iter()
        .map(|(code, m)| {
            let f1 = m
                .get("f1")
                .and_then(Value::as_f64)
                .ok_or_else(|| LidError::Report(format!("`{code}` has no f1")))?;
            Ok((code.clone(), f1))
        })
        .collect()
}

pub fn read_f1_table(path: &Path) -> Result<BTreeMap<String, f64>> {
    let text = fs::read_to_string(path).map_err(|e| LidError::io(path, e))?;
    parse_f1_table(&text).map_err(|e| match e {
        LidError::Corpus { line, message } => {
            LidError::Report(format!("{}:{line}: {message}", path.display()))
        }
        LidError::Report(m) => LidError::Report(format!("{}: {m}", path.display())),
        other => other,
    })
}
