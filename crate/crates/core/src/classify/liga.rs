use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{build_postings, empty_input_unless, pad_str, Document, Grouped, Postings};
use crate::classify::params::LigaParams;
use crate::error::{Error, Result};
use crate::profiles::{padded, separator_for, write_gram, CharGramCounter, CharNGramCounts};

pub const LIGA_ORDERS: (usize, usize) = (3, 4);

/// Relative frequencies of trigrams and 4-grams; a document scores the sum of
/// the frequencies of its grams, higher is better.
#[derive(Debug, Clone, PartialEq)]
pub struct LigaModel {
    params: LigaParams,
    counts: Vec<CharNGramCounts>,
    index: Postings<String, f64>,
}

impl LigaModel {
    pub(crate) fn train(params: &LigaParams, grouped: &Grouped) -> Result<Self> {
        let mut all = Vec::with_capacity(grouped.docs.len());
        for (label, docs) in grouped.labels.iter().zip(&grouped.docs) {
            let mut counter =
                CharGramCounter::new(LIGA_ORDERS.0, LIGA_ORDERS.1, pad_str(&params.pad))?;
            for doc in docs {
                counter.add_stream(&doc.stream);
            }
            let counts = counter.finish();
            if counts.is_empty() {
                return Err(Error::EmptyClass(label.clone()));
            }
            all.push(counts);
        }
        Self::from_counts(params.clone(), all)
    }

    pub fn from_counts(params: LigaParams, counts: Vec<CharNGramCounts>) -> Result<Self> {
        let mut entries = Vec::new();
        for (lang, table) in counts.iter().enumerate() {
            if (table.n_min, table.n_max) != LIGA_ORDERS {
                return Err(Error::Invariant(format!(
                    "language {lang}: LIGA tables hold orders 3 and 4"
                )));
            }
            if !table.totals_consistent() {
                return Err(Error::Invariant(format!(
                    "language {lang}: totals do not match counts"
                )));
            }
            for (n, gram, c) in table.iter() {
                entries.push((lang as u32, gram.clone(), c as f64 / table.total(n) as f64));
            }
        }
        Ok(LigaModel {
            params,
            counts,
            index: build_postings(entries.into_iter()),
        })
    }

    pub fn params(&self) -> &LigaParams {
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
        let sep = separator_for(doc.stream.unit);
        let mut buf = String::new();
        let mut scores = alloc::vec![0.0f64; self.counts.len()];
        for segment in doc.stream.segments() {
            let units = padded(&segment, pad_str(&self.params.pad));
            for n in LIGA_ORDERS.0..=LIGA_ORDERS.1 {
                if units.len() < n {
                    continue;
                }
                for window in units.windows(n) {
                    write_gram(&mut buf, window, sep);
                    if let Some(postings) = self.index.get(buf.as_str()) {
                        for &(lang, freq) in postings {
                            scores[lang as usize] += freq;
                        }
                    }
                }
            }
        }
        Ok(scores)
    }
}
