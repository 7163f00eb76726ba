use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` distinct valid language codes: "laa", "lab", ...
pub fn codes(count: usize) -> Vec<String> {
    assert!(count <= 26 * 26);
    (0..count)
        .map(|i| {
            let a = (b'a' + (i / 26) as u8) as char;
            let b = (b'a' + (i % 26) as u8) as char;
            format!("l{a}{b}")
        })
        .collect()
}

/// A character bigram source: a start distribution and one transition row per
/// symbol, all drawn at random and sharpened so sources are distinguishable.
#[derive(Debug, Clone)]
pub struct MarkovSource {
    alphabet: Vec<char>,
    start: WeightedIndex<f64>,
    rows: Vec<WeightedIndex<f64>>,
}

impl MarkovSource {
    /// `sharpness` raises uniform weights to that power; larger values give
    /// peakier rows.
    pub fn random(alphabet: &[char], sharpness: f64, rng: &mut impl Rng) -> Self {
        let weights = |rng: &mut dyn rand::RngCore| {
            let w: Vec<f64> = (0..alphabet.len())
                .map(|_| rng.gen::<f64>().powf(sharpness) + 1e-3)
                .collect();
            WeightedIndex::new(w).expect("positive weights")
        };
        let start = weights(rng);
        let rows = (0..alphabet.len()).map(|_| weights(rng)).collect();
        MarkovSource {
            alphabet: alphabet.to_vec(),
            start,
            rows,
        }
    }

    /// A sentence of words of 2..=8 symbols, at least `min_chars` scalars long.
    pub fn sentence(&self, min_chars: usize, rng: &mut impl Rng) -> String {
        let mut out = String::new();
        let mut len = 0;
        while len < min_chars {
            if !out.is_empty() {
                out.push(' ');
                len += 1;
            }
            let word_len = rng.gen_range(2..=8);
            let mut state = self.start.sample(rng);
            for _ in 0..word_len {
                out.push(self.alphabet[state]);
                len += 1;
                state = self.rows[state].sample(rng);
            }
        }
        out
    }
}

/// Lowercase Latin letters, shared by the overlapping-alphabet languages.
pub fn latin_alphabet() -> Vec<char> {
    ('a'..='z').collect()
}

/// Labeled sentences from one Markov source per code.
pub fn markov_corpus(
    codes: &[String],
    alphabet: &[char],
    per_language: usize,
    min_chars: usize,
    seed: u64,
) -> Vec<(String, String)> {
    let mut r = rng(seed);
    let sources: Vec<MarkovSource> = codes
        .iter()
        .map(|_| MarkovSource::random(alphabet, 3.0, &mut r))
        .collect();
    let mut out = Vec::with_capacity(codes.len() * per_language);
    for (code, source) in codes.iter().zip(&sources) {
        for _ in 0..per_language {
            let extra = r.gen_range(0..40);
            out.push((code.clone(), source.sentence(min_chars + extra, &mut r)));
        }
    }
    out
}

/// Ethiopic syllables and Cyrillic lowercase letters: two code-point ranges
/// that share nothing with each other or with Latin.
pub fn unique_script_alphabets() -> [Vec<char>; 2] {
    [
        ('\u{1200}'..='\u{1218}').collect(),
        ('\u{0430}'..='\u{044F}').collect(),
    ]
}

/// Latin Markov languages plus two languages written in their own scripts; the
/// unique-script codes are returned separately.
pub fn unique_script_corpus(
    latin_languages: usize,
    per_language: usize,
    seed: u64,
) -> (Vec<(String, String)>, Vec<String>) {
    let all = codes(latin_languages + 2);
    let (latin, unique) = all.split_at(latin_languages);
    let mut out = markov_corpus(latin, &latin_alphabet(), per_language, 20, seed);
    let mut r = rng(seed ^ 0x5eed);
    for (code, alphabet) in unique.iter().zip(unique_script_alphabets()) {
        let source = MarkovSource::random(&alphabet, 2.0, &mut r);
        for _ in 0..per_language {
            out.push((code.clone(), source.sentence(20, &mut r)));
        }
    }
    (out, unique.to_vec())
}

/// Tiny random corpus for oracle comparisons: up to `max_langs` languages,
/// each with 1..=`max_sentences` sentences over the first `alphabet_size`
/// letters.
pub fn tiny_corpus(
    rng: &mut impl Rng,
    max_langs: usize,
    max_sentences: usize,
    alphabet_size: usize,
) -> Vec<(String, Vec<String>)> {
    let alphabet: Vec<char> = ('a'..='z').take(alphabet_size).collect();
    let langs = rng.gen_range(1..=max_langs);
    codes(langs)
        .into_iter()
        .map(|code| {
            let n = rng.gen_range(1..=max_sentences);
            let texts = (0..n).map(|_| tiny_text(rng, &alphabet, 12)).collect();
            (code, texts)
        })
        .collect()
}

/// Words over `alphabet` joined by single spaces, 1..=`max_len` scalars.
pub fn tiny_text(rng: &mut impl Rng, alphabet: &[char], max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len);
    let mut s = String::new();
    while s.len() < len {
        if !s.is_empty() && rng.gen_bool(0.2) && s.len() + 1 < len {
            s.push(' ');
        }
        s.push(alphabet[rng.gen_range(0..alphabet.len())]);
    }
    s
}
