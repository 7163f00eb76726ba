use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

/// Per-language F1 of several tools side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub tools: Vec<String>,
    /// One row per language any tool supports; `None` where a tool lacks it.
    pub rows: Vec<(String, Vec<Option<f64>>)>,
    /// Languages every tool supports; wins are counted over these.
    pub shared: usize,
    pub wins: Vec<usize>,
    pub ties: usize,
}

/// Builds the table. A language wins for a tool when that tool alone has the
/// highest F1; a shared maximum is a tie.
pub fn compare(reports: &BTreeMap<String, BTreeMap<String, f64>>) -> Comparison {
    let tools: Vec<String> = reports.keys().cloned().collect();
    let languages: BTreeSet<&String> = reports.values().flat_map(|r| r.keys()).collect();
    let mut rows = Vec::with_capacity(languages.len());
    let mut wins = alloc::vec![0usize; tools.len()];
    let (mut shared, mut ties) = (0, 0);
    for code in languages {
        let cells: Vec<Option<f64>> = reports.values().map(|r| r.get(code).copied()).collect();
        if !cells.is_empty() && cells.iter().all(Option::is_some) {
            shared += 1;
            let values: Vec<f64> = cells.iter().flatten().copied().collect();
            let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let leaders: Vec<usize> = (0..values.len()).filter(|i| values[*i] == best).collect();
            if leaders.len() == 1 {
                wins[leaders[0]] += 1;
            } else {
                ties += 1;
            }
        }
        rows.push((code.clone(), cells));
    }
    Comparison {
        tools,
        rows,
        shared,
        wins,
        ties,
    }
}

impl Comparison {
    /// Tab-separated table with `-` for unsupported languages, then one win
    /// line per tool.
    pub fn render(&self) -> String {
        let mut out = String::from("language");
        for tool in &self.tools {
            out.push('\t');
            out.push_str(tool);
        }
        out.push('\n');
        for (code, cells) in &self.rows {
            out.push_str(code);
            for cell in cells {
                match cell {
                    Some(v) => {
                        let _ = write!(out, "\t{v:.4}");
                    }
                    None => out.push_str("\t-"),
                }
            }
            out.push('\n');
        }
        for (tool, w) in self.tools.iter().zip(&self.wins) {
            out.push_str(&format!("{tool} wins {w}/{}\n", self.shared));
        }
        out.push_str(&format!("ties {}/{}\n", self.ties, self.shared));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn reports(entries: &[(&str, &[(&str, f64)])]) -> BTreeMap<String, BTreeMap<String, f64>> {
        entries
            .iter()
            .map(|(tool, rows)| {
                (
                    tool.to_string(),
                    rows.iter().map(|(c, f)| (c.to_string(), *f)).collect(),
                )
            })
            .collect()
    }

    #[test]
    fn unsupported_language_renders_a_dash() {
        let c = compare(&reports(&[
            ("X", &[("yor", 0.9)]),
            ("Y", &[("yor", 0.8), ("hau", 0.7)]),
        ]));
        assert_eq!(c.rows[0], ("hau".to_string(), alloc::vec![None, Some(0.7)]));
        let text = c.render();
        assert!(text.contains("hau\t-\t0.7000"));
        assert!(text.contains("X wins 1/1"));
        assert!(text.contains("Y wins 0/1"));
    }

    #[test]
    fn equal_scores_tie() {
        let c = compare(&reports(&[("X", &[("yor", 0.9)]), ("Y", &[("yor", 0.9)])]));
        assert_eq!(c.wins, alloc::vec![0, 0]);
        assert_eq!(c.ties, 1);
    }
}
