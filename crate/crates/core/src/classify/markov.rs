use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::{empty_input_unless, Document, Grouped};
use crate::classify::params::MarkovParams;
use crate::error::{Error, Result};

/// First-order Markov chain over units, one per language.
///
/// States are the training alphabet plus one unknown symbol. Initial and
/// transition probabilities are relative frequencies with additive smoothing
/// `alpha` over all states; the score is the log-probability of the unit
/// sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModel {
    params: MarkovParams,
    init: Vec<BTreeMap<String, u64>>,
    transitions: Vec<BTreeMap<(String, String), u64>>,
    // derived
    symbols: HashMap<String, u32>,
    states: usize,
    init_log: Vec<Vec<f64>>,
    trans_log: Vec<HashMap<(u32, u32), f64>>,
    row_unseen_log: Vec<Vec<f64>>,
}

impl MarkovModel {
    pub(crate) fn train(params: &MarkovParams, grouped: &Grouped) -> Result<Self> {
        let mut init = Vec::with_capacity(grouped.docs.len());
        let mut transitions = Vec::with_capacity(grouped.docs.len());
        for (label, docs) in grouped.labels.iter().zip(&grouped.docs) {
            let mut first: BTreeMap<String, u64> = BTreeMap::new();
            let mut pairs: BTreeMap<(String, String), u64> = BTreeMap::new();
            for doc in docs {
                let seq = doc.unit_sequence();
                let Some(head) = seq.first() else { continue };
                *first.entry(String::from(*head)).or_insert(0) += 1;
                for w in seq.windows(2) {
                    *pairs
                        .entry((String::from(w[0]), String::from(w[1])))
                        .or_insert(0) += 1;
                }
            }
            if first.is_empty() {
                return Err(Error::EmptyClass(label.clone()));
            }
            init.push(first);
            transitions.push(pairs);
        }
        Self::from_counts(params.clone(), init, transitions)
    }

    pub fn from_counts(
        params: MarkovParams,
        init: Vec<BTreeMap<String, u64>>,
        transitions: Vec<BTreeMap<(String, String), u64>>,
    ) -> Result<Self> {
        if init.len() != transitions.len() {
            return Err(Error::Invariant(
                "initial and transition tables differ in length".into(),
            ));
        }
        let alpha = params.alpha;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::BadParams(format!("alpha {alpha} must be > 0")));
        }
        let mut alphabet: BTreeSet<&String> = BTreeSet::new();
        for (lang, (first, pairs)) in init.iter().zip(&transitions).enumerate() {
            if first.values().sum::<u64>() == 0 {
                return Err(Error::Invariant(format!(
                    "language {lang}: no initial counts"
                )));
            }
            alphabet.extend(first.keys());
            for (a, b) in pairs.keys() {
                alphabet.insert(a);
                alphabet.insert(b);
            }
        }
        let symbols: HashMap<String, u32> = alphabet
            .iter()
            .enumerate()
            .map(|(i, s)| ((*s).clone(), i as u32))
            .collect();
        // one extra state for unknown symbols
        let states = symbols.len() + 1;
        let smooth = alpha * states as f64;

        let mut init_log = Vec::with_capacity(init.len());
        let mut trans_log = Vec::with_capacity(init.len());
        let mut row_unseen_log = Vec::with_capacity(init.len());
        for (first, pairs) in init.iter().zip(&transitions) {
            let starts: u64 = first.values().sum();
            let denom = starts as f64 + smooth;
            let mut row = alloc::vec![libm::log(alpha / denom); states];
            for (s, c) in first {
                row[symbols[s.as_str()] as usize] = libm::log((*c as f64 + alpha) / denom);
            }
            init_log.push(row);

            let mut row_totals = alloc::vec![0u64; states];
            for ((a, _), c) in pairs {
                row_totals[symbols[a.as_str()] as usize] += c;
            }
            let unseen: Vec<f64> = row_totals
                .iter()
                .map(|t| libm::log(alpha / (*t as f64 + smooth)))
                .collect();
            let mut seen = HashMap::with_capacity(pairs.len());
            for ((a, b), c) in pairs {
                let (ia, ib) = (symbols[a.as_str()], symbols[b.as_str()]);
                let t = row_totals[ia as usize] as f64;
                seen.insert((ia, ib), libm::log((*c as f64 + alpha) / (t + smooth)));
            }
            trans_log.push(seen);
            row_unseen_log.push(unseen);
        }
        Ok(MarkovModel {
            params,
            init,
            transitions,
            symbols,
            states,
            init_log,
            trans_log,
            row_unseen_log,
        })
    }

    pub fn params(&self) -> &MarkovParams {
        &self.params
    }

    pub fn language_count(&self) -> usize {
        self.init.len()
    }

    pub fn initial_counts(&self) -> &[BTreeMap<String, u64>] {
        &self.init
    }

    pub fn transition_counts(&self) -> &[BTreeMap<(String, String), u64>] {
        &self.transitions
    }

    /// Training alphabet size plus the unknown state.
    pub fn state_count(&self) -> usize {
        self.states
    }

    fn state_of(&self, unit: &str) -> u32 {
        self.symbols
            .get(unit)
            .copied()
            .unwrap_or(self.states as u32 - 1)
    }

    /// Log transition probability `prev -> next` for one language.
    pub fn transition_log_prob(&self, lang: usize, prev: &str, next: &str) -> f64 {
        let (a, b) = (self.state_of(prev), self.state_of(next));
        self.trans_log[lang]
            .get(&(a, b))
            .copied()
            .unwrap_or(self.row_unseen_log[lang][a as usize])
    }

    pub fn initial_log_prob(&self, lang: usize, unit: &str) -> f64 {
        self.init_log[lang][self.state_of(unit) as usize]
    }

    pub fn scores(&self, doc: &Document) -> Result<Vec<f64>> {
        let seq = doc.unit_sequence();
        empty_input_unless(!seq.is_empty())?;
        let states: Vec<u32> = seq.iter().map(|u| self.state_of(u)).collect();
        Ok((0..self.init.len())
            .map(|l| {
                let mut lp = self.init_log[l][states[0] as usize];
                for w in states.windows(2) {
                    lp += self.trans_log[l]
                        .get(&(w[0], w[1]))
                        .copied()
                        .unwrap_or(self.row_unseen_log[l][w[0] as usize]);
                }
                lp
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::TokenizerSpec;
    use alloc::string::ToString;

    fn doc(text: &str) -> Document {
        Document::new(&TokenizerSpec::default(), text)
    }

    fn grouped(samples: &[&[&str]]) -> Grouped {
        Grouped {
            labels: (0..samples.len())
                .map(|i| ["aaa", "bbb", "ccc"][i].to_string())
                .collect(),
            docs: samples
                .iter()
                .map(|s| s.iter().map(|t| doc(t)).collect())
                .collect(),
        }
    }

    #[test]
    fn deterministic_chain_scores_near_zero() {
        let g = grouped(&[&["ab", "ab"], &["ba"]]);
        let model = MarkovModel::train(&MarkovParams { alpha: 1e-12 }, &g).unwrap();
        let s = model.scores(&doc("ab")).unwrap();
        assert!(s[0].abs() < 1e-9, "{}", s[0]);
        assert!(s[0] > s[1]);
        let reversed = model.scores(&doc("ba")).unwrap();
        assert!(reversed[0] < s[0]);
    }

    #[test]
    fn single_unit_uses_only_the_initial_probability() {
        let g = grouped(&[&["ab", "cb"]]);
        let model = MarkovModel::train(&MarkovParams { alpha: 0.5 }, &g).unwrap();
        let s = model.scores(&doc("a")).unwrap();
        assert_eq!(s[0], model.initial_log_prob(0, "a"));
        // states a, b, c, unknown; 2 starts
        assert!((s[0] - libm::log(1.5 / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn transition_rows_are_distributions() {
        let g = grouped(&[&["abcab", "bca"], &["cc"]]);
        let model = MarkovModel::train(&MarkovParams { alpha: 0.3 }, &g).unwrap();
        let alphabet = ["a", "b", "c", "?unknown?"];
        for lang in 0..2 {
            for prev in alphabet {
                let total: f64 = alphabet
                    .iter()
                    .map(|next| libm::exp(model.transition_log_prob(lang, prev, next)))
                    .sum();
                assert!((total - 1.0).abs() < 1e-9, "{lang} {prev}: {total}");
            }
        }
    }

    #[test]
    fn empty_document() {
        let g = grouped(&[&["ab"]]);
        let model = MarkovModel::train(&MarkovParams::default(), &g).unwrap();
        assert_eq!(model.scores(&doc(" ")), Err(Error::EmptyInput));
    }
}
