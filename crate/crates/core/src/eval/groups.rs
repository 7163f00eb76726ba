use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::EvalReport;
use crate::error::{Error, Result};

/// Where one group member's test samples went.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberErrors {
    pub code: String,
    pub support: u64,
    pub correct: f64,
    /// Confused with another member of the group.
    pub within_group: f64,
    /// Confused with a language outside the group.
    pub others: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupErrorReport {
    pub group: String,
    pub members: Vec<MemberErrors>,
    /// Share of all errors made on group members that stay inside the group;
    /// `None` when there are no errors.
    pub within_share_of_errors: Option<f64>,
    /// Members skipped because the model lacks them or they have no support.
    pub warnings: Vec<String>,
}

/// Splits each member's confusion row into correct, within-group and outside
/// fractions.
pub fn group_errors<S: AsRef<str>>(
    report: &EvalReport,
    name: &str,
    group: &[S],
) -> Result<GroupErrorReport> {
    let codes: BTreeSet<&str> = group.iter().map(AsRef::as_ref).collect();
    if codes.is_empty() {
        return Err(Error::EmptyGroup(name.to_string()));
    }
    let cm = &report.confusion;
    let mut members = Vec::new();
    let mut warnings = Vec::new();
    let (mut within_errors, mut all_errors) = (0u64, 0u64);
    for code in &codes {
        let Some(g) = cm.index_of(code) else {
            warnings.push(format!("{code}: not a model label, skipped"));
            continue;
        };
        let row = &cm.cells()[g];
        let support: u64 = row.iter().sum();
        if support == 0 {
            warnings.push(format!("{code}: no test samples, skipped"));
            continue;
        }
        let mut within = 0u64;
        for (p, label) in cm.labels().iter().enumerate() {
            if p != g && codes.contains(label.as_str()) {
                within += row[p];
            }
        }
        let correct = row[g];
        let others = support - correct - within;
        within_errors += within;
        all_errors += within + others;
        let frac = |k: u64| k as f64 / support as f64;
        members.push(MemberErrors {
            code: code.to_string(),
            support,
            correct: frac(correct),
            within_group: frac(within),
            others: frac(others),
        });
    }
    Ok(GroupErrorReport {
        group: name.to_string(),
        members,
        within_share_of_errors: (all_errors > 0).then(|| within_errors as f64 / all_errors as f64),
        warnings,
    })
}
