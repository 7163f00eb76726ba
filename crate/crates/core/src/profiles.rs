//! N-gram counting, rank profiles and smoothed relative frequencies.
//!
//! Char-unit grams are keys built by joining consecutive units. Units are single
//! scalars for char and word streams; BPE units can be longer, so their grams
//! are joined with [`UNIT_SEPARATOR`] to keep `("ab","c")` and `("a","bc")`
//! apart. Byte grams are raw UTF-8 slices and are never padded.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::text::{TokenStream, TokenUnit};

pub const DEFAULT_PAD: &str = "_";
pub const UNIT_SEPARATOR: char = '\u{1F}';

/// Separator used between units of one gram for a given token unit.
pub fn separator_for(unit: TokenUnit) -> &'static str {
    match unit {
        TokenUnit::Bpe => "\u{1F}",
        TokenUnit::Char | TokenUnit::Word => "",
    }
}

/// Units of one segment with optional padding on both sides.
pub fn padded<'a>(units: &[&'a str], pad: Option<&'a str>) -> Vec<&'a str> {
    let mut out = Vec::with_capacity(units.len() + 2);
    out.extend(pad);
    out.extend_from_slice(units);
    out.extend(pad);
    out
}

/// Writes the key of `units` into `buf`, replacing its contents.
pub fn write_gram(buf: &mut String, units: &[&str], sep: &str) {
    buf.clear();
    for (i, u) in units.iter().enumerate() {
        if i > 0 {
            buf.push_str(sep);
        }
        buf.push_str(u);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramUnit {
    CharNGram,
    ByteNGram,
}

/// Per-order gram counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramCounts<G: Ord> {
    pub unit: GramUnit,
    pub n_min: usize,
    pub n_max: usize,
    orders: Vec<BTreeMap<G, u64>>,
    totals: Vec<u64>,
}

pub type CharNGramCounts = NGramCounts<String>;
pub type ByteNGramCounts = NGramCounts<Vec<u8>>;

fn check_orders(n_min: usize, n_max: usize) -> Result<()> {
    if n_min == 0 || n_max < n_min {
        return Err(Error::BadParams(format!(
            "n-gram orders {n_min}..={n_max} are invalid"
        )));
    }
    Ok(())
}

impl<G: Ord + Clone> NGramCounts<G> {
    pub fn new(unit: GramUnit, n_min: usize, n_max: usize) -> Result<Self> {
        check_orders(n_min, n_max)?;
        let width = n_max - n_min + 1;
        Ok(NGramCounts {
            unit,
            n_min,
            n_max,
            orders: (0..width).map(|_| BTreeMap::new()).collect(),
            totals: alloc::vec![0; width],
        })
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> {
        self.n_min..=self.n_max
    }

    fn slot(&self, n: usize) -> Option<usize> {
        (self.n_min..=self.n_max)
            .contains(&n)
            .then(|| n - self.n_min)
    }

    pub fn order(&self, n: usize) -> Option<&BTreeMap<G, u64>> {
        self.slot(n).map(|i| &self.orders[i])
    }

    pub fn count<Q>(&self, n: usize, gram: &Q) -> u64
    where
        G: core::borrow::Borrow<Q>,
        Q: Ord + ?Sized,
    {
        self.order(n)
            .and_then(|m| m.get(gram))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self, n: usize) -> u64 {
        self.slot(n).map_or(0, |i| self.totals[i])
    }

    /// Adds `count` occurrences; orders outside the range are ignored.
    pub fn add(&mut self, n: usize, gram: G, count: u64) {
        if count == 0 {
            return;
        }
        if let Some(i) = self.slot(n) {
            *self.orders[i].entry(gram).or_insert(0) += count;
            self.totals[i] += count;
        }
    }

    /// Distinct grams over all orders.
    pub fn len(&self) -> usize {
        self.orders.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(order, gram, count)` in order, then gram.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &G, u64)> {
        self.orders
            .iter()
            .enumerate()
            .flat_map(move |(i, m)| m.iter().map(move |(g, c)| (self.n_min + i, g, *c)))
    }

    /// Keeps only grams accepted by `keep`. Totals are left untouched so
    /// relative frequencies keep the denominator of the full table.
    pub fn retain(&mut self, mut keep: impl FnMut(usize, &G, u64) -> bool) {
        let n_min = self.n_min;
        for (i, m) in self.orders.iter_mut().enumerate() {
            m.retain(|g, c| keep(n_min + i, g, *c));
        }
    }

    /// Overrides the stored total for order `n`; used when a truncated table
    /// must keep the frequency denominator of the full one.
    pub fn set_total(&mut self, n: usize, total: u64) {
        if let Some(i) = self.slot(n) {
            self.totals[i] = total;
        }
    }

    /// True when every total equals the sum of its order's counts.
    pub fn totals_consistent(&self) -> bool {
        self.orders
            .iter()
            .zip(&self.totals)
            .all(|(m, t)| m.values().sum::<u64>() == *t)
    }
}

/// Accumulates counts with a hash map and hands back an ordered table.
#[derive(Debug)]
pub struct CharGramCounter {
    n_min: usize,
    n_max: usize,
    pad: Option<String>,
    orders: Vec<HashMap<String, u64>>,
    buf: String,
}

impl CharGramCounter {
    pub fn new(n_min: usize, n_max: usize, pad: Option<&str>) -> Result<Self> {
        check_orders(n_min, n_max)?;
        Ok(CharGramCounter {
            n_min,
            n_max,
            pad: pad.map(String::from),
            orders: (n_min..=n_max).map(|_| HashMap::new()).collect(),
            buf: String::new(),
        })
    }

    pub fn add_stream(&mut self, stream: &TokenStream) {
        let sep = separator_for(stream.unit);
        for segment in stream.segments() {
            let units = padded(&segment, self.pad.as_deref());
            for n in self.n_min..=self.n_max {
                if units.len() < n {
                    continue;
                }
                let map = &mut self.orders[n - self.n_min];
                for window in units.windows(n) {
                    write_gram(&mut self.buf, window, sep);
                    match map.get_mut(self.buf.as_str()) {
                        Some(c) => *c += 1,
                        None => {
                            map.insert(self.buf.clone(), 1);
                        }
                    }
                }
            }
        }
    }

    pub fn finish(self) -> CharNGramCounts {
        let mut out = NGramCounts::new(GramUnit::CharNGram, self.n_min, self.n_max)
            .expect("orders validated in new");
        for (i, map) in self.orders.into_iter().enumerate() {
            let mut entries: Vec<(String, u64)> = map.into_iter().collect();
            entries.sort_unstable();
            out.totals[i] = entries.iter().map(|e| e.1).sum();
            out.orders[i] = entries.into_iter().collect();
        }
        out
    }
}

#[derive(Debug)]
pub struct ByteGramCounter {
    n_min: usize,
    n_max: usize,
    orders: Vec<HashMap<Vec<u8>, u64>>,
}

impl ByteGramCounter {
    pub fn new(n_min: usize, n_max: usize) -> Result<Self> {
        check_orders(n_min, n_max)?;
        Ok(ByteGramCounter {
            n_min,
            n_max,
            orders: (n_min..=n_max).map(|_| HashMap::new()).collect(),
        })
    }

    pub fn add_bytes(&mut self, bytes: &[u8]) {
        for n in self.n_min..=self.n_max {
            if bytes.len() < n {
                continue;
            }
            let map = &mut self.orders[n - self.n_min];
            for window in bytes.windows(n) {
                match map.get_mut(window) {
                    Some(c) => *c += 1,
                    None => {
                        map.insert(window.to_vec(), 1);
                    }
                }
            }
        }
    }

    pub fn finish(self) -> ByteNGramCounts {
        let mut out = NGramCounts::new(GramUnit::ByteNGram, self.n_min, self.n_max)
            .expect("orders validated in new");
        for (i, map) in self.orders.into_iter().enumerate() {
            let mut entries: Vec<(Vec<u8>, u64)> = map.into_iter().collect();
            entries.sort_unstable();
            out.totals[i] = entries.iter().map(|e| e.1).sum();
            out.orders[i] = entries.into_iter().collect();
        }
        out
    }
}

/// Counts unit n-grams of one stream. Each segment (the whole char stream, or
/// one word) is padded with `pad` on both sides.
pub fn extract_ngrams(
    stream: &TokenStream,
    n_min: usize,
    n_max: usize,
    pad: Option<&str>,
) -> Result<CharNGramCounts> {
    let mut counter = CharGramCounter::new(n_min, n_max, pad)?;
    if stream.is_empty() {
        return Err(Error::EmptyInput);
    }
    counter.add_stream(stream);
    Ok(counter.finish())
}

/// Counts byte n-grams of a UTF-8 buffer, without padding.
pub fn extract_byte_ngrams(bytes: &[u8], n_min: usize, n_max: usize) -> Result<ByteNGramCounts> {
    let mut counter = ByteGramCounter::new(n_min, n_max)?;
    if bytes.is_empty() {
        return Err(Error::EmptyInput);
    }
    counter.add_bytes(bytes);
    Ok(counter.finish())
}

/// Grams ordered by count (descending) then gram (ascending), truncated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile<G: Ord> {
    ordered: Vec<G>,
    rank_of: BTreeMap<G, usize>,
}

impl<G: Ord + Clone> RankProfile<G> {
    fn from_entries(mut entries: Vec<(&G, u64)>, max_rank: usize) -> Self {
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        entries.truncate(max_rank);
        let ordered: Vec<G> = entries.into_iter().map(|(g, _)| g.clone()).collect();
        let rank_of = ordered
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        RankProfile { ordered, rank_of }
    }

    pub fn ordered(&self) -> &[G] {
        &self.ordered
    }

    pub fn rank<Q>(&self, gram: &Q) -> Option<usize>
    where
        G: core::borrow::Borrow<Q>,
        Q: Ord + ?Sized,
    {
        self.rank_of.get(gram).copied()
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }
}

/// One ranked list mixing every order.
pub fn build_rank_profile<G: Ord + Clone>(
    counts: &NGramCounts<G>,
    max_rank: usize,
) -> RankProfile<G> {
    let entries = counts.iter().map(|(_, g, c)| (g, c)).collect();
    RankProfile::from_entries(entries, max_rank)
}

/// One ranked list per order, in order `n_min..=n_max`.
pub fn build_rank_profiles_per_order<G: Ord + Clone>(
    counts: &NGramCounts<G>,
    max_rank: usize,
) -> Vec<RankProfile<G>> {
    counts
        .orders()
        .map(|n| {
            let entries = counts
                .order(n)
                .map(|m| m.iter().map(|(g, c)| (g, *c)).collect())
                .unwrap_or_default();
            RankProfile::from_entries(entries, max_rank)
        })
        .collect()
}

/// Additively smoothed relative frequencies:
/// `(count + alpha) / (total_n + alpha * vocab_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelFreqTable<G: Ord> {
    pub alpha: f64,
    pub n_min: usize,
    orders: Vec<BTreeMap<G, f64>>,
    denominators: Vec<f64>,
}

impl<G: Ord + Clone> RelFreqTable<G> {
    pub fn get<Q>(&self, n: usize, gram: &Q) -> Option<f64>
    where
        G: core::borrow::Borrow<Q>,
        Q: Ord + ?Sized,
    {
        let i = n.checked_sub(self.n_min)?;
        self.orders.get(i)?.get(gram).copied()
    }

    /// Frequency assigned to a gram of order `n` that was never counted.
    pub fn unseen(&self, n: usize) -> f64 {
        match n
            .checked_sub(self.n_min)
            .and_then(|i| self.denominators.get(i))
        {
            Some(d) if *d > 0.0 => self.alpha / d,
            _ => 0.0,
        }
    }

    pub fn order(&self, n: usize) -> Option<&BTreeMap<G, f64>> {
        self.orders.get(n.checked_sub(self.n_min)?)
    }
}

/// `vocab_size_per_order` maps an order to the number of possible grams; orders
/// missing from it use the number of distinct observed grams.
pub fn relfreq<G: Ord + Clone>(
    counts: &NGramCounts<G>,
    alpha: f64,
    vocab_size_per_order: &BTreeMap<usize, u64>,
) -> Result<RelFreqTable<G>> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::BadParams(format!(
            "smoothing alpha {alpha} must be >= 0"
        )));
    }
    let mut orders = Vec::new();
    let mut denominators = Vec::new();
    for n in counts.orders() {
        let table = counts.order(n).expect("order in range");
        let vocab = vocab_size_per_order
            .get(&n)
            .copied()
            .unwrap_or(table.len() as u64);
        let denom = counts.total(n) as f64 + alpha * vocab as f64;
        let freqs = if denom > 0.0 {
            table
                .iter()
                .map(|(g, c)| (g.clone(), (*c as f64 + alpha) / denom))
                .collect()
        } else {
            BTreeMap::new()
        };
        orders.push(freqs);
        denominators.push(denom);
    }
    Ok(RelFreqTable {
        alpha,
        n_min: counts.n_min,
        orders,
        denominators,
    })
}
