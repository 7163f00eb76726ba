use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::{build_postings, empty_input_unless, Document, Grouped, Postings};
use crate::classify::params::NaiveBayesParams;
use crate::error::{Error, Result};
use crate::profiles::{ByteGramCounter, ByteNGramCounts};

/// Multinomial naive Bayes over a mixture of byte n-grams.
///
/// `log P(L | d) = log P(L) + sum over gram occurrences of
/// log((c_L(g) + alpha) / (T_L,n + alpha * V_n))`, where `V_n` is the number of
/// distinct order-`n` grams seen in training. Grams outside that vocabulary
/// carry no evidence and are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    params: NaiveBayesParams,
    sample_counts: Vec<u64>,
    counts: Vec<ByteNGramCounts>,
    vocab_sizes: Vec<u64>,
    log_priors: Vec<f64>,
    // [lang][order - n_min]: log(alpha / (T + alpha * V))
    log_unseen: Vec<Vec<f64>>,
    // gram -> (lang, log((c + alpha) / alpha)) for languages that saw it
    index: Postings<Vec<u8>, f64>,
}

impl NaiveBayesModel {
    pub(crate) fn train(params: &NaiveBayesParams, grouped: &Grouped) -> Result<Self> {
        let mut counts = Vec::with_capacity(grouped.docs.len());
        let mut samples = Vec::with_capacity(grouped.docs.len());
        for docs in &grouped.docs {
            let mut counter = ByteGramCounter::new(params.n_min, params.n_max)?;
            for doc in docs {
                counter.add_bytes(doc.collapsed.as_bytes());
            }
            counts.push(counter.finish());
            samples.push(docs.len() as u64);
        }
        Self::from_counts(params.clone(), samples, counts)
    }

    pub fn from_counts(
        params: NaiveBayesParams,
        sample_counts: Vec<u64>,
        counts: Vec<ByteNGramCounts>,
    ) -> Result<Self> {
        if sample_counts.len() != counts.len() {
            return Err(Error::Invariant(
                "one sample count per language is required".into(),
            ));
        }
        if sample_counts.contains(&0) {
            return Err(Error::Invariant(
                "every language needs at least one sample".into(),
            ));
        }
        let alpha = params.alpha;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::BadParams(format!("alpha {alpha} must be > 0")));
        }
        let orders = params.n_min..=params.n_max;
        for (lang, table) in counts.iter().enumerate() {
            if (table.n_min, table.n_max) != (params.n_min, params.n_max) {
                return Err(Error::Invariant(format!(
                    "language {lang}: orders do not match"
                )));
            }
            if !table.totals_consistent() {
                return Err(Error::Invariant(format!(
                    "language {lang}: totals do not match counts"
                )));
            }
        }

        let vocab_sizes: Vec<u64> = orders
            .clone()
            .map(|n| {
                let distinct: BTreeSet<&Vec<u8>> = counts
                    .iter()
                    .flat_map(|t| t.order(n).into_iter().flat_map(|m| m.keys()))
                    .collect();
                distinct.len() as u64
            })
            .collect();

        let langs = counts.len();
        let log_priors = if params.uniform_prior {
            alloc::vec![-libm::log(langs as f64); langs]
        } else {
            let total: u64 = sample_counts.iter().sum();
            sample_counts
                .iter()
                .map(|n| libm::log(*n as f64 / total as f64))
                .collect()
        };
        let log_unseen = counts
            .iter()
            .map(|t| {
                orders
                    .clone()
                    .zip(&vocab_sizes)
                    .map(|(n, v)| libm::log(alpha / (t.total(n) as f64 + alpha * *v as f64)))
                    .collect()
            })
            .collect();
        let index = build_postings(counts.iter().enumerate().flat_map(|(lang, t)| {
            t.iter().map(move |(_, g, c)| {
                (
                    lang as u32,
                    g.clone(),
                    libm::log((c as f64 + alpha) / alpha),
                )
            })
        }));
        Ok(NaiveBayesModel {
            params,
            sample_counts,
            counts,
            vocab_sizes,
            log_priors,
            log_unseen,
            index,
        })
    }

    pub fn params(&self) -> &NaiveBayesParams {
        &self.params
    }

    pub fn language_count(&self) -> usize {
        self.counts.len()
    }

    pub fn sample_counts(&self) -> &[u64] {
        &self.sample_counts
    }

    pub fn counts(&self) -> &[ByteNGramCounts] {
        &self.counts
    }

    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    /// Distinct training grams per order, `n_min` first.
    pub fn vocab_sizes(&self) -> &[u64] {
        &self.vocab_sizes
    }

    pub fn scores(&self, doc: &Document) -> Result<Vec<f64>> {
        let bytes = doc.collapsed.as_bytes();
        empty_input_unless(!bytes.is_empty())?;
        let (n_min, n_max) = (self.params.n_min, self.params.n_max);
        let mut occurrences = alloc::vec![0u64; n_max - n_min + 1];
        let mut evidence = alloc::vec![0.0f64; self.counts.len()];
        for n in n_min..=n_max {
            if bytes.len() < n {
                continue;
            }
            for window in bytes.windows(n) {
                if let Some(postings) = self.index.get(window) {
                    occurrences[n - n_min] += 1;
                    for &(lang, gain) in postings {
                        evidence[lang as usize] += gain;
                    }
                }
            }
        }
        Ok((0..self.counts.len())
            .map(|l| {
                let base: f64 = occurrences
                    .iter()
                    .zip(&self.log_unseen[l])
                    .map(|(k, u)| *k as f64 * u)
                    .sum();
                self.log_priors[l] + base + evidence[l]
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{rank_predictions, ScoreDirection};
    use crate::profiles::{GramUnit, NGramCounts};
    use crate::text::TokenizerSpec;
    use alloc::string::String;
    use alloc::vec;

    fn unigrams(entries: &[(u8, u64)]) -> ByteNGramCounts {
        let mut c = NGramCounts::new(GramUnit::ByteNGram, 1, 1).unwrap();
        for (b, k) in entries {
            c.add(1, vec![*b], *k);
        }
        c
    }

    fn params() -> NaiveBayesParams {
        NaiveBayesParams {
            n_min: 1,
            n_max: 1,
            alpha: 1.0,
            uniform_prior: false,
        }
    }

    fn mirrored() -> NaiveBayesModel {
        NaiveBayesModel::from_counts(
            params(),
            vec![5, 5],
            vec![
                unigrams(&[(b'a', 3), (b'b', 1)]),
                unigrams(&[(b'a', 1), (b'b', 3)]),
            ],
        )
        .unwrap()
    }

    fn doc(text: &str) -> Document {
        Document::new(&TokenizerSpec::default(), text)
    }

    #[test]
    fn smoothed_likelihoods_pick_the_right_class() {
        let model = mirrored();
        let s = model.scores(&doc("aa")).unwrap();
        let prior = libm::log(0.5);
        assert!((s[0] - (prior + 2.0 * libm::log(4.0 / 6.0))).abs() < 1e-12);
        assert!((s[1] - (prior + 2.0 * libm::log(2.0 / 6.0))).abs() < 1e-12);
        assert!(s[0] > s[1]);
    }

    #[test]
    fn symmetric_document_ties() {
        let model = mirrored();
        let s = model.scores(&doc("ab")).unwrap();
        let labels: Vec<String> = vec!["aaa".into(), "bbb".into()];
        let ranked = rank_predictions(&labels, &s, ScoreDirection::HigherIsBetter, 1.0);
        assert_eq!(ranked[0].code, "aaa");
        assert!((ranked[0].confidence - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unseen_grams_leave_the_prior() {
        let model = NaiveBayesModel::from_counts(
            params(),
            vec![3, 1],
            vec![
                unigrams(&[(b'a', 3), (b'b', 1)]),
                unigrams(&[(b'a', 1), (b'b', 3)]),
            ],
        )
        .unwrap();
        let s = model.scores(&doc("zz")).unwrap();
        assert_eq!(s, model.log_priors().to_vec());
        assert!(s[0] > s[1]);
    }

    #[test]
    fn equal_classes_get_equal_priors() {
        let model = mirrored();
        let p = model.log_priors();
        assert!((p[0] - p[1]).abs() < 1e-12);
        let total: f64 = p.iter().map(|x| libm::exp(*x)).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vocabulary_is_shared_across_languages() {
        let model = NaiveBayesModel::from_counts(
            params(),
            vec![1, 1],
            vec![unigrams(&[(b'a', 1)]), unigrams(&[(b'b', 1), (b'c', 1)])],
        )
        .unwrap();
        assert_eq!(model.vocab_sizes(), &[3]);
    }
}
