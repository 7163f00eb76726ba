use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{build_postings, empty_input_unless, pad_str, Document, Grouped, Postings};
use crate::classify::params::HeliParams;
use crate::error::{Error, Result};
use crate::profiles::{padded, separator_for, write_gram, CharGramCounter, CharNGramCounts};

/// Per-language tables of `-log10(relative frequency)` for orders `1..=nmax`.
///
/// At each position of the document the longest gram (up to `nmax`) that any
/// language knows is chosen; languages without that gram pay `penalty`. The
/// score is the mean over positions, lower is better.
#[derive(Debug, Clone, PartialEq)]
pub struct HeliModel {
    params: HeliParams,
    counts: Vec<CharNGramCounts>,
    index: Postings<String, f64>,
}

impl HeliModel {
    pub(crate) fn train(params: &HeliParams, grouped: &Grouped) -> Result<Self> {
        let mut all = Vec::with_capacity(grouped.docs.len());
        for (label, docs) in grouped.labels.iter().zip(&grouped.docs) {
            let mut counter = CharGramCounter::new(1, params.nmax, pad_str(&params.pad))?;
            for doc in docs {
                counter.add_stream(&doc.stream);
            }
            let mut counts = counter.finish();
            if counts.is_empty() {
                return Err(Error::EmptyClass(label.clone()));
            }
            keep_top_per_order(&mut counts, params.top_f);
            let worst = counts
                .iter()
                .map(|(n, _, c)| neg_log10(c, counts.total(n)))
                .fold(0.0, f64::max);
            if worst >= params.penalty {
                return Err(Error::BadParams(format!(
                    "penalty {} must exceed every stored value; `{label}` has {worst}",
                    params.penalty
                )));
            }
            all.push(counts);
        }
        Self::from_counts(params.clone(), all)
    }

    /// Rebuilds the model from kept counts; totals are those of the full
    /// (untruncated) tables.
    pub fn from_counts(params: HeliParams, counts: Vec<CharNGramCounts>) -> Result<Self> {
        let mut entries = Vec::new();
        for (lang, table) in counts.iter().enumerate() {
            if table.n_min != 1 || table.n_max != params.nmax {
                return Err(Error::Invariant(format!(
                    "language {lang}: orders {}..={} do not match nmax {}",
                    table.n_min, table.n_max, params.nmax
                )));
            }
            for n in table.orders() {
                let kept = table.order(n).map_or(0, |m| m.len());
                if kept > params.top_f {
                    return Err(Error::Invariant(format!(
                        "language {lang}: {kept} grams of order {n} exceed top_f"
                    )));
                }
            }
            for (n, gram, c) in table.iter() {
                let total = table.total(n);
                if c > total {
                    return Err(Error::Invariant(format!(
                        "language {lang}: count exceeds order-{n} total"
                    )));
                }
                let value = neg_log10(c, total);
                if value.is_nan() || value >= params.penalty {
                    return Err(Error::Invariant(format!(
                        "language {lang}: value {value} is not below the penalty"
                    )));
                }
                entries.push((lang as u32, gram.clone(), value));
            }
        }
        Ok(HeliModel {
            params,
            counts,
            index: build_postings(entries.into_iter()),
        })
    }

    pub fn params(&self) -> &HeliParams {
        &self.params
    }

    pub fn language_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[CharNGramCounts] {
        &self.counts
    }

    pub fn scores(&self, doc: &Document) -> Result<Vec<f64>> {
        empty_input_unless(!doc.stream.is_empty())?;
        let langs = self.counts.len();
        let penalty = self.params.penalty;
        let sep = separator_for(doc.stream.unit);
        let mut buf = String::new();
        let mut position_scores = alloc::vec![0.0f64; langs];
        let mut total = alloc::vec![0.0f64; langs];
        let mut positions = 0usize;
        let mut segment_means = alloc::vec![0.0f64; langs];
        let mut segments = 0usize;

        for segment in doc.stream.segments() {
            let units = padded(&segment, pad_str(&self.params.pad));
            let mut seg_sum = alloc::vec![0.0f64; langs];
            for i in 0..units.len() {
                let longest = self.params.nmax.min(units.len() - i);
                let postings = (1..=longest).rev().find_map(|n| {
                    write_gram(&mut buf, &units[i..i + n], sep);
                    self.index.get(buf.as_str())
                });
                position_scores.iter_mut().for_each(|s| *s = penalty);
                if let Some(postings) = postings {
                    for &(lang, value) in postings {
                        position_scores[lang as usize] = value;
                    }
                }
                for (acc, s) in seg_sum.iter_mut().zip(&position_scores) {
                    *acc += s;
                }
            }
            let len = units.len();
            if len == 0 {
                continue;
            }
            for l in 0..langs {
                total[l] += seg_sum[l];
                segment_means[l] += seg_sum[l] / len as f64;
            }
            positions += len;
            segments += 1;
        }
        empty_input_unless(positions > 0)?;
        Ok(if self.params.word_average {
            segment_means.iter().map(|s| s / segments as f64).collect()
        } else {
            total.iter().map(|s| s / positions as f64).collect()
        })
    }
}

fn neg_log10(count: u64, total: u64) -> f64 {
    -libm::log10(count as f64 / total as f64)
}

fn keep_top_per_order(counts: &mut CharNGramCounts, top_f: usize) {
    let mut keep = alloc::collections::BTreeSet::new();
    for n in counts.orders() {
        let mut ranked: Vec<(&String, u64)> = counts
            .order(n)
            .map(|m| m.iter().map(|(g, c)| (g, *c)).collect())
            .unwrap_or_default();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        keep.extend(ranked.into_iter().take(top_f).map(|(g, _)| (n, g.clone())));
    }
    counts.retain(|n, g, _| keep.contains(&(n, g.clone())));
}
