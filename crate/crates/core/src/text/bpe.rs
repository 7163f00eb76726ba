//! Byte-pair encoding over Unicode scalars.
//!
//! Words come from [`tokenize_words`]; each word is split into scalars and
//! terminated by [`END_OF_WORD`]. Training greedily merges the most frequent
//! adjacent pair (ties go to the lexicographically smallest concatenation).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;

use super::{tokenize_words, NormalizedText, TokenStream, TokenUnit};
use crate::error::{Error, Result};

/// Reserved end-of-word symbol, from the private use area so it sorts after
/// every letter a word tokenizer can produce in practice.
pub const END_OF_WORD: char = '\u{E000}';

const DEFAULT_MIN_PAIR_FREQUENCY: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    base: BTreeSet<String>,
    merges: Vec<(String, String)>,
    vocab: BTreeSet<String>,
    target_vocab_size: usize,
    ranks: BTreeMap<String, BTreeMap<String, usize>>,
}

impl BpeModel {
    /// A model with no merges; encoding yields scalars plus end-of-word markers.
    pub fn empty() -> Self {
        let base: BTreeSet<String> = [END_OF_WORD.to_string()].into_iter().collect();
        BpeModel {
            vocab: base.clone(),
            base,
            merges: Vec::new(),
            target_vocab_size: 1,
            ranks: BTreeMap::new(),
        }
    }

    /// Rebuilds a model from its base alphabet and merge list, checking that
    /// every merge combines symbols that already exist.
    pub fn from_parts(
        base: impl IntoIterator<Item = String>,
        merges: Vec<(String, String)>,
        target_vocab_size: usize,
    ) -> Result<Self> {
        let mut base: BTreeSet<String> = base.into_iter().collect();
        base.insert(END_OF_WORD.to_string());
        let mut vocab = base.clone();
        let mut ranks: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        for (rank, (left, right)) in merges.iter().enumerate() {
            if !vocab.contains(left) || !vocab.contains(right) {
                return Err(Error::Invariant(format!(
                    "merge {rank} ({left:?}, {right:?}) uses an unknown symbol"
                )));
            }
            if left.ends_with(END_OF_WORD) {
                return Err(Error::Invariant(format!(
                    "merge {rank} crosses the end-of-word marker"
                )));
            }
            let slot = ranks.entry(left.clone()).or_default();
            if slot.contains_key(right) {
                return Err(Error::Invariant(format!("merge {rank} is repeated")));
            }
            slot.insert(right.clone(), rank);
            vocab.insert(format!("{left}{right}"));
        }
        if vocab.len() > target_vocab_size {
            return Err(Error::Invariant(format!(
                "vocabulary of {} exceeds target size {target_vocab_size}",
                vocab.len()
            )));
        }
        Ok(BpeModel {
            base,
            merges,
            vocab,
            target_vocab_size,
            ranks,
        })
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    /// Base symbols: every training scalar plus the end-of-word marker.
    pub fn base_symbols(&self) -> &BTreeSet<String> {
        &self.base
    }

    pub fn target_vocab_size(&self) -> usize {
        self.target_vocab_size
    }

    fn rank(&self, left: &str, right: &str) -> Option<usize> {
        self.ranks.get(left)?.get(right).copied()
    }

    /// Segments one word. Merges are applied in training order, each one to
    /// every occurrence left to right.
    pub fn encode_word(&self, word: &str) -> Vec<String> {
        let mut symbols: Vec<String> = word.chars().map(|c| c.to_string()).collect();
        symbols.push(END_OF_WORD.to_string());
        let mut last_applied: Option<usize> = None;
        loop {
            let next = symbols
                .windows(2)
                .filter_map(|w| self.rank(&w[0], &w[1]))
                .filter(|r| last_applied.map_or(true, |last| *r > last))
                .min();
            let Some(rank) = next else { break };
            let (left, right) = &self.merges[rank];
            symbols = apply_merge(symbols, left, right);
            last_applied = Some(rank);
        }
        symbols
    }
}

fn apply_merge(symbols: Vec<String>, left: &str, right: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut iter = symbols.into_iter().peekable();
    while let Some(sym) = iter.next() {
        if sym == left && iter.peek().is_some_and(|n| n == right) {
            let next = iter.next().unwrap_or_default();
            out.push(sym + &next);
        } else {
            out.push(sym);
        }
    }
    out
}

/// Trains with the default minimum pair frequency of 2.
pub fn bpe_train(corpus: &[NormalizedText], target_vocab_size: usize) -> Result<BpeModel> {
    bpe_train_with(corpus, target_vocab_size, DEFAULT_MIN_PAIR_FREQUENCY)
}

struct Interner {
    symbols: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(id) = self.ids.get(s) {
            return *id;
        }
        let id = self.symbols.len() as u32;
        self.symbols.push(s.to_string());
        self.ids.insert(s.to_string(), id);
        id
    }

    fn concat_cmp(&self, a: (u32, u32), b: (u32, u32)) -> Ordering {
        let sa = self.symbols[a.0 as usize]
            .bytes()
            .chain(self.symbols[a.1 as usize].bytes());
        let sb = self.symbols[b.0 as usize]
            .bytes()
            .chain(self.symbols[b.1 as usize].bytes());
        sa.cmp(sb)
    }
}

fn add_pairs(word: &[u32], freq: u64, counts: &mut BTreeMap<(u32, u32), u64>) {
    for w in word.windows(2) {
        *counts.entry((w[0], w[1])).or_insert(0) += freq;
    }
}

fn remove_pairs(word: &[u32], freq: u64, counts: &mut BTreeMap<(u32, u32), u64>) {
    for w in word.windows(2) {
        let key = (w[0], w[1]);
        if let Some(c) = counts.get_mut(&key) {
            *c -= freq;
            if *c == 0 {
                counts.remove(&key);
            }
        }
    }
}

/// Greedy merge training. Stops when the vocabulary reaches
/// `target_vocab_size` or the best pair occurs fewer than `min_pair_frequency`
/// times.
pub fn bpe_train_with(
    corpus: &[NormalizedText],
    target_vocab_size: usize,
    min_pair_frequency: u64,
) -> Result<BpeModel> {
    let mut word_freq: BTreeMap<String, u64> = BTreeMap::new();
    for text in corpus {
        for word in tokenize_words(text).tokens {
            *word_freq.entry(word).or_insert(0) += 1;
        }
    }
    if word_freq.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut interner = Interner {
        symbols: Vec::new(),
        ids: HashMap::new(),
    };
    let eow = END_OF_WORD.to_string();
    let mut base: BTreeSet<String> = BTreeSet::new();
    base.insert(eow.clone());
    let mut words: Vec<(Vec<u32>, u64)> = Vec::with_capacity(word_freq.len());
    let mut buf = [0u8; 4];
    for (word, freq) in &word_freq {
        let mut ids = Vec::with_capacity(word.len() + 1);
        for c in word.chars() {
            let s = c.encode_utf8(&mut buf);
            if !base.contains(&*s) {
                base.insert(s.to_string());
            }
            ids.push(interner.intern(s));
        }
        ids.push(interner.intern(&eow));
        words.push((ids, *freq));
    }
    if target_vocab_size < base.len() {
        return Err(Error::BadParams(format!(
            "target vocabulary {target_vocab_size} is smaller than the {} base symbols",
            base.len()
        )));
    }

    let mut vocab = base.clone();
    let mut pair_counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (word, freq) in &words {
        add_pairs(word, *freq, &mut pair_counts);
    }

    let mut merges = Vec::new();
    while vocab.len() < target_vocab_size {
        let mut best: Option<((u32, u32), u64)> = None;
        for (&pair, &count) in &pair_counts {
            best = match best {
                None => Some((pair, count)),
                Some((bp, bc)) => {
                    let better = count > bc
                        || (count == bc && interner.concat_cmp(pair, bp) == Ordering::Less);
                    if better {
                        Some((pair, count))
                    } else {
                        Some((bp, bc))
                    }
                }
            };
        }
        let Some(((left, right), count)) = best else {
            break;
        };
        if count < min_pair_frequency.max(1) {
            break;
        }
        let merged_str = format!(
            "{}{}",
            interner.symbols[left as usize], interner.symbols[right as usize]
        );
        let merged = interner.intern(&merged_str);
        merges.push((
            interner.symbols[left as usize].clone(),
            interner.symbols[right as usize].clone(),
        ));
        vocab.insert(merged_str);

        for (word, freq) in words.iter_mut() {
            if !word.windows(2).any(|w| w[0] == left && w[1] == right) {
                continue;
            }
            remove_pairs(word, *freq, &mut pair_counts);
            let mut out = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == left && word[i + 1] == right {
                    out.push(merged);
                    i += 2;
                } else {
                    out.push(word[i]);
                    i += 1;
                }
            }
            *word = out;
            add_pairs(word, *freq, &mut pair_counts);
        }
    }

    let ranks = {
        let mut r: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        for (rank, (l, rr)) in merges.iter().enumerate() {
            r.entry(l.clone()).or_default().insert(rr.clone(), rank);
        }
        r
    };
    Ok(BpeModel {
        base,
        merges,
        vocab,
        target_vocab_size,
        ranks,
    })
}

/// Encodes every word; each word's last token ends with [`END_OF_WORD`].
pub fn bpe_encode(model: &BpeModel, text: &NormalizedText) -> TokenStream {
    let words = tokenize_words(text);
    let mut tokens = Vec::new();
    for word in &words.tokens {
        tokens.extend(model.encode_word(word));
    }
    TokenStream {
        unit: TokenUnit::Bpe,
        tokens,
        source_len: words.source_len,
    }
}

/// Concatenates tokens and splits at end-of-word markers.
pub fn decode_bpe(stream: &TokenStream) -> Vec<String> {
    let joined: String = stream.tokens.concat();
    joined
        .split(END_OF_WORD)
        .filter(|w| !w.is_empty())
        .map(ToString::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{normalize, NormForm};
    use alloc::vec;

    fn norm(s: &str) -> NormalizedText {
        normalize(s, NormForm::Composed)
    }

    fn pair(a: &str, b: &str) -> (String, String) {
        (a.to_string(), b.to_string())
    }

    #[test]
    fn first_merge_is_the_most_frequent_pair() {
        let model = bpe_train(&[norm("aa aa ab")], 5).unwrap();
        assert_eq!(model.merges()[0], pair("a", "a"));
        assert!(model.vocab().len() <= 5);
    }

    #[test]
    fn target_equal_to_base_means_no_merges() {
        // base symbols: a, b, end-of-word
        let model = bpe_train(&[norm("ab")], 3).unwrap();
        assert!(model.merges().is_empty());
        assert!(matches!(
            bpe_train(&[norm("ab")], 2),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn repeated_merges_with_recount() {
        let model = bpe_train_with(&[norm("aaaa")], 4, 1).unwrap();
        assert_eq!(model.merges(), &[pair("a", "a"), pair("aa", "aa")]);
        // with the default frequency floor the second merge (count 1) is skipped
        let model = bpe_train(&[norm("aaaa")], 4).unwrap();
        assert_eq!(model.merges(), &[pair("a", "a")]);
    }

    #[test]
    fn empty_corpus() {
        assert_eq!(bpe_train(&[], 10), Err(Error::EmptyCorpus));
        assert_eq!(bpe_train(&[norm(" ,. ")], 10), Err(Error::EmptyCorpus));
    }

    #[test]
    fn encode_with_single_merge() {
        let model =
            BpeModel::from_parts(["a".to_string(), "b".to_string()], vec![pair("a", "a")], 10)
                .unwrap();
        let stream = bpe_encode(&model, &norm("aab"));
        assert_eq!(stream.tokens, vec!["aa", "b", "\u{e000}"]);
    }

    #[test]
    fn encode_without_merges_and_unseen_scalars() {
        let stream = bpe_encode(&BpeModel::empty(), &norm("ab"));
        assert_eq!(stream.tokens, vec!["a", "b", "\u{e000}"]);
        let model = bpe_train(&[norm("aa aa")], 10).unwrap();
        let stream = bpe_encode(&model, &norm("ሰ"));
        assert_eq!(decode_bpe(&stream), vec!["ሰ"]);
    }

    #[test]
    fn from_parts_rejects_bad_merges() {
        assert!(BpeModel::from_parts(["a".to_string()], vec![pair("a", "b")], 10).is_err());
        assert!(BpeModel::from_parts(["a".to_string()], vec![pair("a", "a")], 2).is_err());
    }

    #[test]
    fn training_order_is_respected_when_encoding() {
        let corpus = [norm("abc abc abc bc bc bc bc ab")];
        let model = bpe_train(&corpus, 12).unwrap();
        for word in ["abc", "bc", "ab", "abcbc", "cab"] {
            let tokens = model.encode_word(word);
            // replay merges one by one, in order, as the oracle
            let mut symbols: Vec<String> = word.chars().map(|c| c.to_string()).collect();
            symbols.push(END_OF_WORD.to_string());
            for (l, r) in model.merges() {
                symbols = apply_merge(symbols, l, r);
            }
            assert_eq!(tokens, symbols, "{word}");
        }
    }
}
