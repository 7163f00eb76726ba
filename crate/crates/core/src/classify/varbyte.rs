use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::{build_postings, empty_input_unless, Document, Grouped, Postings};
use crate::classify::params::VarByteParams;
use crate::error::{Error, Result};
use crate::profiles::{ByteGramCounter, ByteNGramCounts};

/// A gram is dropped when one of its extensions occurs at least this often,
/// in percent of the gram's own count.
pub const EXTENSION_RATIO_PERCENT: u64 = 62;

/// Byte n-grams of orders 3..=12 after the extension filter, at most `k` per
/// language. Each kept gram weighs `n * count / total_n`; a document scores the
/// sum of the weights of its grams, higher is better.
#[derive(Debug, Clone, PartialEq)]
pub struct VarByteModel {
    params: VarByteParams,
    counts: Vec<ByteNGramCounts>,
    index: Postings<Vec<u8>, f64>,
}

fn dominated(ext: u64, base: u64) -> bool {
    100 * ext >= EXTENSION_RATIO_PERCENT * base
}

/// Removes every gram that has a one-byte extension (left or right) with at
/// least 62% of its count. Longer extensions never need checking: each of them
/// occurs at most as often as the one-byte extension it contains. Totals are
/// left untouched.
pub fn filter_extensions(counts: &mut ByteNGramCounts) {
    let mut drop: BTreeSet<(usize, Vec<u8>)> = BTreeSet::new();
    for n in counts.orders() {
        let (Some(shorter), Some(longer)) = (counts.order(n), counts.order(n + 1)) else {
            continue;
        };
        for (ext, &c) in longer {
            for part in [&ext[..n], &ext[1..]] {
                if let Some(&base) = shorter.get(part) {
                    if dominated(c, base) {
                        drop.insert((n, part.to_vec()));
                    }
                }
            }
        }
    }
    counts.retain(|n, g, _| !drop.contains(&(n, g.clone())));
}

/// Pairs of kept grams `(g, g')` where `g'` strictly contains `g` and reaches
/// 62% of its count. A correctly filtered table has none.
pub fn extension_violations(counts: &ByteNGramCounts) -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut found = Vec::new();
    for (_, ext, c) in counts.iter() {
        let mut seen = BTreeSet::new();
        for len in counts.n_min..ext.len() {
            for part in ext.windows(len) {
                if !seen.insert(part) {
                    continue;
                }
                let base = counts.count(len, part);
                if base > 0 && dominated(c, base) {
                    found.push((part.to_vec(), ext.clone()));
                }
            }
        }
    }
    found.sort();
    found
}

fn keep_top(counts: &mut ByteNGramCounts, k: usize) {
    let mut ranked: Vec<(u64, usize, &Vec<u8>)> =
        counts.iter().map(|(n, g, c)| (c, n, g)).collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.2.cmp(b.2)));
    let keep: BTreeSet<(usize, Vec<u8>)> = ranked
        .into_iter()
        .take(k)
        .map(|(_, n, g)| (n, g.clone()))
        .collect();
    counts.retain(|n, g, _| keep.contains(&(n, g.clone())));
}

impl VarByteModel {
    pub(crate) fn train(params: &VarByteParams, grouped: &Grouped) -> Result<Self> {
        let mut all = Vec::with_capacity(grouped.docs.len());
        for (label, docs) in grouped.labels.iter().zip(&grouped.docs) {
            let mut counter = ByteGramCounter::new(params.n_min, params.n_max)?;
            for doc in docs {
                counter.add_bytes(doc.collapsed.as_bytes());
            }
            let mut counts = counter.finish();
            if counts.is_empty() {
                return Err(Error::EmptyClass(label.clone()));
            }
            filter_extensions(&mut counts);
            keep_top(&mut counts, params.k);
            all.push(counts);
        }
        Self::from_counts(params.clone(), all)
    }

    /// Rebuilds the model from kept grams; totals are those of the full tables.
    pub fn from_counts(params: VarByteParams, counts: Vec<ByteNGramCounts>) -> Result<Self> {
        let mut entries = Vec::new();
        for (lang, table) in counts.iter().enumerate() {
            if (table.n_min, table.n_max) != (params.n_min, params.n_max) {
                return Err(Error::Invariant(format!(
                    "language {lang}: orders do not match"
                )));
            }
            if table.len() > params.k {
                return Err(Error::Invariant(format!(
                    "language {lang}: {} grams exceed k = {}",
                    table.len(),
                    params.k
                )));
            }
            if let Some((g, ext)) = extension_violations(table).first() {
                return Err(Error::Invariant(format!(
                    "language {lang}: {g:?} kept next to its frequent extension {ext:?}"
                )));
            }
            for (n, gram, c) in table.iter() {
                let total = table.total(n);
                if c > total {
                    return Err(Error::Invariant(format!(
                        "language {lang}: count exceeds order-{n} total"
                    )));
                }
                entries.push((
                    lang as u32,
                    gram.clone(),
                    n as f64 * c as f64 / total as f64,
                ));
            }
        }
        Ok(VarByteModel {
            params,
            counts,
            index: build_postings(entries.into_iter()),
        })
    }

    pub fn params(&self) -> &VarByteParams {
        &self.params
    }

    pub fn language_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[ByteNGramCounts] {
        &self.counts
    }

    pub fn scores(&self, doc: &Document) -> Result<Vec<f64>> {
        let bytes = doc.collapsed.as_bytes();
        empty_input_unless(!bytes.is_empty())?;
        let mut scores = alloc::vec![0.0f64; self.counts.len()];
        for n in self.params.n_min..=self.params.n_max.min(bytes.len()) {
            for window in bytes.windows(n) {
                if let Some(postings) = self.index.get(window) {
                    for &(lang, w) in postings {
                        scores[lang as usize] += w;
                    }
                }
            }
        }
        Ok(scores)
    }
}
