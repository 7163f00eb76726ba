use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Per-language sample budget for train/dev/test splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_n: usize,
    pub dev_n: usize,
    pub test_n: usize,
    /// Languages with fewer samples are excluded entirely.
    pub min_total: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_n: 5000,
            dev_n: 50,
            test_n: 100,
            min_total: 2000,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.train_n == 0 || self.dev_n == 0 || self.test_n == 0 || self.min_total == 0 {
            return Err(Error::BadParams("split sizes must be positive".into()));
        }
        if self.dev_n + self.test_n > self.min_total {
            return Err(Error::BadParams(format!(
                "dev_n + test_n = {} exceeds min_total {}",
                self.dev_n + self.test_n,
                self.min_total
            )));
        }
        Ok(())
    }
}

/// SplitMix64 (Steele, Lea and Flood). Constants: increment
/// `0x9E3779B97F4A7C15`, mixers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`
/// with shifts 30, 27 and 31.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform index in `0..bound` by multiply-shift.
    pub fn below(&mut self, bound: usize) -> usize {
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    /// Fisher-Yates, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// 64-bit FNV-1a, used to give every language its own stream.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<(String, String)>,
    pub dev: Vec<(String, String)>,
    pub test: Vec<(String, String)>,
    /// Codes with fewer than `min_total` samples, sorted.
    pub excluded: Vec<String>,
}

/// Shuffles each language with its own seeded stream, then deals out
/// `dev_n`, `test_n` and up to `train_n` samples in that order. Output is
/// grouped by code in sorted order.
pub fn split_corpus<S: AsRef<str>, T: AsRef<str>>(
    corpus: &[(S, T)],
    spec: &SplitSpec,
) -> Result<Split> {
    spec.validate()?;
    let mut by_code: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (code, text) in corpus {
        by_code
            .entry(code.as_ref())
            .or_default()
            .push(text.as_ref());
    }
    let mut out = Split::default();
    for (code, mut texts) in by_code {
        if texts.len() < spec.min_total {
            out.excluded.push(String::from(code));
            continue;
        }
        SplitMix64::new(spec.seed ^ fnv1a(code.as_bytes())).shuffle(&mut texts);
        let pair = |t: &&str| (String::from(code), String::from(*t));
        let (dev, rest) = texts.split_at(spec.dev_n);
        let (test, rest) = rest.split_at(spec.test_n);
        let train = &rest[..spec.train_n.min(rest.len())];
        out.dev.extend(dev.iter().map(pair));
        out.test.extend(test.iter().map(pair));
        out.train.extend(train.iter().map(pair));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn corpus(sizes: &[(&str, usize)]) -> Vec<(String, String)> {
        sizes
            .iter()
            .flat_map(|(code, n)| {
                (0..*n).map(move |i| (String::from(*code), format!("{code} {i}")))
            })
            .collect()
    }

    #[test]
    fn full_language_gets_exact_budgets() {
        let split = split_corpus(&corpus(&[("yor", 5150)]), &SplitSpec::default()).unwrap();
        assert_eq!(
            (split.train.len(), split.dev.len(), split.test.len()),
            (5000, 50, 100)
        );
    }

    #[test]
    fn small_language_is_excluded() {
        let split = split_corpus(
            &corpus(&[("hau", 1999), ("yor", 2000)]),
            &SplitSpec::default(),
        )
        .unwrap();
        assert_eq!(split.excluded, vec![String::from("hau")]);
        assert!(split.train.iter().all(|(c, _)| c == "yor"));
    }

    #[test]
    fn remainder_goes_to_train() {
        let split = split_corpus(&corpus(&[("ibo", 3000)]), &SplitSpec::default()).unwrap();
        assert_eq!(
            (split.train.len(), split.dev.len(), split.test.len()),
            (2850, 50, 100)
        );
    }

    #[test]
    fn splits_are_disjoint_and_seeded() {
        let data = corpus(&[("ibo", 2100), ("yor", 2300)]);
        let a = split_corpus(
            &data,
            &SplitSpec {
                seed: 7,
                ..SplitSpec::default()
            },
        )
        .unwrap();
        let b = split_corpus(
            &data,
            &SplitSpec {
                seed: 7,
                ..SplitSpec::default()
            },
        )
        .unwrap();
        let c = split_corpus(
            &data,
            &SplitSpec {
                seed: 8,
                ..SplitSpec::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
        assert_ne!(a.dev, c.dev);
        assert_eq!(a.dev.len(), c.dev.len());
        let mut all: Vec<&(String, String)> = a.train.iter().chain(&a.dev).chain(&a.test).collect();
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn budgets_must_fit_the_minimum() {
        let spec = SplitSpec {
            dev_n: 1500,
            test_n: 600,
            ..SplitSpec::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn splitmix_reference_values() {
        // first outputs for seed 0, as published with the reference implementation
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xe220_a839_7b1d_cdaf);
        assert_eq!(rng.next_u64(), 0x6e78_9e6a_a1b9_65f4);
    }
}
