use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::classify::LanguageModel;
use crate::error::{Error, Result};

/// Counts of `(gold, predicted)` over a fixed, sorted label set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    cells: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(mut labels: Vec<String>) -> Self {
        labels.sort();
        labels.dedup();
        let n = labels.len();
        ConfusionMatrix {
            labels,
            cells: alloc::vec![alloc::vec![0; n]; n],
        }
    }

    /// Rebuilds a matrix from stored cells.
    pub fn from_cells(labels: Vec<String>, cells: Vec<Vec<u64>>) -> Result<Self> {
        if !labels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Invariant(
                "confusion labels must be sorted and unique".into(),
            ));
        }
        if cells.len() != labels.len() || cells.iter().any(|r| r.len() != labels.len()) {
            return Err(Error::Invariant(
                "confusion matrix must be square over its labels".into(),
            ));
        }
        Ok(ConfusionMatrix { labels, cells })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cells(&self) -> &[Vec<u64>] {
        &self.cells
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(code)).ok()
    }

    pub fn record(&mut self, gold: &str, pred: &str) -> Result<()> {
        let g = self
            .index_of(gold)
            .ok_or_else(|| Error::UnknownGoldLabel(gold.to_string()))?;
        let p = self.index_of(pred).ok_or_else(|| {
            Error::Invariant(alloc::format!("prediction `{pred}` is not a label"))
        })?;
        self.cells[g][p] += 1;
        Ok(())
    }

    pub fn get(&self, gold: &str, pred: &str) -> u64 {
        match (self.index_of(gold), self.index_of(pred)) {
            (Some(g), Some(p)) => self.cells[g][p],
            _ => 0,
        }
    }

    /// Row sum: the number of samples whose gold label is `code`.
    pub fn support(&self, code: &str) -> u64 {
        self.index_of(code)
            .map_or(0, |i| self.cells[i].iter().sum())
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.cells[i][i]).sum()
    }

    fn column_sum(&self, j: usize) -> u64 {
        self.cells.iter().map(|r| r[j]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Which classes macro-F1 averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MacroAverage {
    /// Classes with at least one gold sample.
    #[default]
    GoldPresent,
    /// Every model label.
    AllLabels,
}

/// Per-class F1 buckets: exactly 1, `[0.95, 1)`, `[0.90, 0.95)`, below 0.90.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct F1Histogram {
    pub perfect: u64,
    pub from_95: u64,
    pub from_90: u64,
    pub below_90: u64,
}

impl F1Histogram {
    pub fn total(&self) -> u64 {
        self.perfect + self.from_95 + self.from_90 + self.below_90
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub macro_f1: f64,
    /// The classes macro-F1 averages over.
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub confusion: ConfusionMatrix,
    pub f1_histogram: F1Histogram,
    pub average: MacroAverage,
}

impl EvalReport {
    /// Builds the report from a filled matrix.
    pub fn from_confusion(confusion: ConfusionMatrix, average: MacroAverage) -> EvalReport {
        let total = confusion.total();
        let accuracy = if total == 0 {
            0.0
        } else {
            confusion.trace() as f64 / total as f64
        };
        let mut per_class = BTreeMap::new();
        let mut histogram = F1Histogram::default();
        for (i, code) in confusion.labels().iter().enumerate() {
            let tp = confusion.cells[i][i];
            let support: u64 = confusion.cells[i].iter().sum();
            if support == 0 && average == MacroAverage::GoldPresent {
                continue;
            }
            let predicted = confusion.column_sum(i);
            let (fp, fn_) = (predicted - tp, support - tp);
            let ratio = |num: u64, den: u64| {
                if den == 0 {
                    0.0
                } else {
                    num as f64 / den as f64
                }
            };
            // 2PR / (P + R) written over counts; zero when nothing matched
            let f1_den = 2 * tp + fp + fn_;
            let f1 = ratio(2 * tp, f1_den);
            if tp > 0 && fp == 0 && fn_ == 0 {
                histogram.perfect += 1;
            } else if f1_den > 0 && 100 * 2 * tp >= 95 * f1_den {
                histogram.from_95 += 1;
            } else if f1_den > 0 && 100 * 2 * tp >= 90 * f1_den {
                histogram.from_90 += 1;
            } else {
                histogram.below_90 += 1;
            }
            per_class.insert(
                code.clone(),
                ClassMetrics {
                    precision: ratio(tp, predicted),
                    recall: ratio(tp, support),
                    f1,
                    support,
                },
            );
        }
        let macro_f1 = if per_class.is_empty() {
            0.0
        } else {
            per_class.values().map(|m| m.f1).sum::<f64>() / per_class.len() as f64
        };
        EvalReport {
            accuracy,
            macro_f1,
            per_class,
            confusion,
            f1_histogram: histogram,
            average,
        }
    }

    /// Builds the report from `(gold, predicted)` pairs over `labels`.
    pub fn from_pairs<G: AsRef<str>, P: AsRef<str>>(
        labels: &[String],
        pairs: &[(G, P)],
        average: MacroAverage,
    ) -> Result<EvalReport> {
        let mut confusion = ConfusionMatrix::new(labels.to_vec());
        for (gold, pred) in pairs {
            confusion.record(gold.as_ref(), pred.as_ref())?;
        }
        Ok(EvalReport::from_confusion(confusion, average))
    }
}

/// Top-1 identification of every sample, scored against its gold code.
pub fn evaluate<S: AsRef<str>, T: AsRef<str>>(
    model: &LanguageModel,
    labeled: &[(S, T)],
    average: MacroAverage,
) -> Result<EvalReport> {
    let mut confusion = ConfusionMatrix::new(model.labels().to_vec());
    for (gold, text) in labeled {
        let gold = gold.as_ref();
        if confusion.index_of(gold).is_none() {
            return Err(Error::UnknownGoldLabel(gold.to_string()));
        }
        let best = model.identify(text.as_ref(), 1)?;
        confusion.record(gold, &best[0].code)?;
    }
    Ok(EvalReport::from_confusion(confusion, average))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn labels(codes: &[&str]) -> Vec<String> {
        codes.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn perfect_predictions() {
        let r = EvalReport::from_pairs(
            &labels(&["aaa", "bbb"]),
            &[("aaa", "aaa"), ("bbb", "bbb")],
            MacroAverage::GoldPresent,
        )
        .unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.f1_histogram.perfect, 2);
    }

    #[test]
    fn two_by_two_by_hand() {
        let pairs = [
            ("aaa", "aaa"),
            ("aaa", "bbb"),
            ("bbb", "bbb"),
            ("bbb", "bbb"),
        ];
        let r = EvalReport::from_pairs(&labels(&["aaa", "bbb"]), &pairs, MacroAverage::GoldPresent)
            .unwrap();
        assert!((r.per_class["aaa"].f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.per_class["bbb"].f1 - 0.8).abs() < 1e-12);
        assert!((r.macro_f1 - (2.0 / 3.0 + 0.8) / 2.0).abs() < 1e-12);
        assert_eq!(r.accuracy, 0.75);
        assert_eq!(r.confusion.support("aaa"), 2);
    }

    #[test]
    fn unpredicted_class_scores_zero() {
        let pairs = [("aaa", "bbb"), ("bbb", "bbb")];
        let r = EvalReport::from_pairs(
            &labels(&["aaa", "bbb", "ccc"]),
            &pairs,
            MacroAverage::AllLabels,
        )
        .unwrap();
        assert_eq!(r.per_class["aaa"].f1, 0.0);
        assert_eq!(r.per_class["ccc"].f1, 0.0);
        assert_eq!(r.per_class.len(), 3);
        assert_eq!(r.f1_histogram.total(), 3);
        let gold_only = EvalReport::from_pairs(
            &labels(&["aaa", "bbb", "ccc"]),
            &pairs,
            MacroAverage::GoldPresent,
        )
        .unwrap();
        assert_eq!(gold_only.per_class.len(), 2);
    }

    #[test]
    fn unknown_gold_label() {
        let r = EvalReport::from_pairs(
            &labels(&["aaa"]),
            &[("zzz", "aaa")],
            MacroAverage::GoldPresent,
        );
        assert_eq!(r, Err(Error::UnknownGoldLabel("zzz".into())));
    }

    #[test]
    fn histogram_boundaries() {
        // 19 of 20 recalled, no false positives: F1 = 38/39 (~0.974)
        let mut pairs = vec![("aaa", "aaa"); 19];
        pairs.push(("aaa", "bbb"));
        pairs.push(("bbb", "bbb"));
        let r = EvalReport::from_pairs(&labels(&["aaa", "bbb"]), &pairs, MacroAverage::GoldPresent)
            .unwrap();
        assert_eq!(r.f1_histogram.from_95, 1);
        // bbb: tp 1, fp 1 -> F1 = 2/3
        assert_eq!(r.f1_histogram.below_90, 1);

        // F1 exactly 0.95: tp 19, fp 1, fn 1 -> 38/40
        let mut pairs = vec![("aaa", "aaa"); 19];
        pairs.push(("aaa", "bbb"));
        pairs.push(("bbb", "aaa"));
        let r = EvalReport::from_pairs(&labels(&["aaa", "bbb"]), &pairs, MacroAverage::GoldPresent)
            .unwrap();
        assert_eq!(r.per_class["aaa"].f1, 0.95);
        assert_eq!(r.f1_histogram.from_95, 1);
    }
}
