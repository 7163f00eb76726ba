use std::collections::{BTreeMap, BTreeSet};

/// The training texts of one language.
pub type LangTexts = Vec<String>;

type CharTable = Vec<(String, u64)>;

/// `(gram, count)` pairs of one order.
pub type ByteTable = Vec<(Vec<u8>, u64)>;

fn char_windows(text: &str, n: usize, pad: Option<char>) -> Vec<String> {
    let mut units: Vec<char> = Vec::new();
    units.extend(pad);
    units.extend(text.chars());
    units.extend(pad);
    if units.len() < n {
        return Vec::new();
    }
    (0..=units.len() - n)
        .map(|i| units[i..i + n].iter().collect())
        .collect()
}

fn byte_windows(text: &str, n: usize) -> Vec<Vec<u8>> {
    let b = text.as_bytes();
    if b.len() < n {
        return Vec::new();
    }
    (0..=b.len() - n).map(|i| b[i..i + n].to_vec()).collect()
}

fn count_of<T: PartialEq>(items: &[(T, u64)], key: &T) -> u64 {
    items.iter().find(|(k, _)| k == key).map_or(0, |(_, c)| *c)
}

/// Counts of every padded char gram of orders `n_min..=n_max`, as
/// `(order, gram, count)`.
pub fn char_gram_counts(
    texts: &[String],
    n_min: usize,
    n_max: usize,
    pad: Option<char>,
) -> Vec<(usize, String, u64)> {
    let mut out: Vec<(usize, String, u64)> = Vec::new();
    for text in texts {
        for n in n_min..=n_max {
            for g in char_windows(text, n, pad) {
                match out.iter_mut().find(|(m, h, _)| *m == n && *h == g) {
                    Some(e) => e.2 += 1,
                    None => out.push((n, g, 1)),
                }
            }
        }
    }
    out
}

fn byte_gram_counts(texts: &[String], n: usize) -> Vec<(Vec<u8>, u64)> {
    let mut out: Vec<(Vec<u8>, u64)> = Vec::new();
    for text in texts {
        for g in byte_windows(text, n) {
            match out.iter_mut().find(|(h, _)| *h == g) {
                Some(e) => e.1 += 1,
                None => out.push((g, 1)),
            }
        }
    }
    out
}

/// Number of windows of length `n_min..=n_max` over `len` units: the count of
/// grams any extractor must produce.
pub fn window_count(len: usize, n_min: usize, n_max: usize) -> usize {
    (n_min..=n_max).map(|n| (len + 1).saturating_sub(n)).sum()
}

fn ranked(mut entries: Vec<(String, u64)>, max_rank: usize) -> Vec<String> {
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    entries.into_iter().take(max_rank).map(|e| e.0).collect()
}

/// Out-of-place distance with one mixed-order profile per side.
pub fn rank_distance(
    langs: &[LangTexts],
    doc: &str,
    n_min: usize,
    n_max: usize,
    max_rank: usize,
    penalty: u64,
    pad: Option<char>,
) -> Vec<u64> {
    let profile = |texts: &[String]| {
        let counts = char_gram_counts(texts, n_min, n_max, pad);
        ranked(
            counts.into_iter().map(|(_, g, c)| (g, c)).collect(),
            max_rank,
        )
    };
    let doc_profile = profile(&[doc.to_string()]);
    langs
        .iter()
        .map(|texts| {
            let lang_profile = profile(texts);
            doc_profile
                .iter()
                .enumerate()
                .map(|(i, g)| match lang_profile.iter().position(|h| h == g) {
                    Some(j) => i.abs_diff(j) as u64,
                    None => penalty,
                })
                .sum()
        })
        .collect()
}

/// Mean over positions of `-log10(count / total)` for the longest gram known
/// to any language, or `penalty`.
pub fn heli(
    langs: &[LangTexts],
    doc: &str,
    nmax: usize,
    penalty: f64,
    top_f: usize,
    pad: Option<char>,
) -> Vec<f64> {
    // per language, per order: kept (gram, count) and the full total
    let tables: Vec<Vec<(CharTable, u64)>> = langs
        .iter()
        .map(|texts| {
            let all = char_gram_counts(texts, 1, nmax, pad);
            (1..=nmax)
                .map(|n| {
                    let mut order: Vec<(String, u64)> = all
                        .iter()
                        .filter(|e| e.0 == n)
                        .map(|e| (e.1.clone(), e.2))
                        .collect();
                    let total = order.iter().map(|e| e.1).sum();
                    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
                    order.truncate(top_f);
                    (order, total)
                })
                .collect()
        })
        .collect();
    let mut units: Vec<char> = Vec::new();
    units.extend(pad);
    units.extend(doc.chars());
    units.extend(pad);
    let mut sums = vec![0.0; langs.len()];
    for i in 0..units.len() {
        let mut chosen = None;
        for n in (1..=nmax.min(units.len() - i)).rev() {
            let g: String = units[i..i + n].iter().collect();
            if tables.iter().any(|t| count_of(&t[n - 1].0, &g) > 0) {
                chosen = Some((n, g));
                break;
            }
        }
        for (l, t) in tables.iter().enumerate() {
            sums[l] += match &chosen {
                Some((n, g)) => {
                    let (kept, total) = &t[n - 1];
                    match count_of(kept, g) {
                        0 => penalty,
                        c => -(c as f64 / *total as f64).log10(),
                    }
                }
                None => penalty,
            };
        }
    }
    sums.iter().map(|s| s / units.len() as f64).collect()
}

/// Sum of trigram and 4-gram relative frequencies over document occurrences.
pub fn liga(langs: &[LangTexts], doc: &str, pad: Option<char>) -> Vec<f64> {
    langs
        .iter()
        .map(|texts| {
            let mut score = 0.0;
            for n in 3..=4 {
                let counts: Vec<(String, u64)> = char_gram_counts(texts, n, n, pad)
                    .into_iter()
                    .map(|(_, g, c)| (g, c))
                    .collect();
                let total: u64 = counts.iter().map(|e| e.1).sum();
                for g in char_windows(doc, n, pad) {
                    let c = count_of(&counts, &g);
                    if c > 0 {
                        score += c as f64 / total as f64;
                    }
                }
            }
            score
        })
        .collect()
}

/// Multinomial naive Bayes over byte grams with add-`alpha` smoothing and
/// empirical priors; grams never seen in training are ignored.
pub fn naive_bayes(
    langs: &[LangTexts],
    doc: &str,
    n_min: usize,
    n_max: usize,
    alpha: f64,
) -> Vec<f64> {
    let samples: u64 = langs.iter().map(|t| t.len() as u64).sum();
    let per_lang: Vec<Vec<ByteTable>> = langs
        .iter()
        .map(|texts| {
            (n_min..=n_max)
                .map(|n| byte_gram_counts(texts, n))
                .collect()
        })
        .collect();
    let vocab: Vec<BTreeSet<Vec<u8>>> = (0..=n_max - n_min)
        .map(|i| {
            per_lang
                .iter()
                .flat_map(|t| t[i].iter().map(|e| e.0.clone()))
                .collect()
        })
        .collect();
    langs
        .iter()
        .enumerate()
        .map(|(l, texts)| {
            let mut lp = (texts.len() as f64 / samples as f64).ln();
            for (i, n) in (n_min..=n_max).enumerate() {
                let table = &per_lang[l][i];
                let total: u64 = table.iter().map(|e| e.1).sum();
                let v = vocab[i].len() as f64;
                for g in byte_windows(doc, n) {
                    if vocab[i].contains(&g) {
                        lp += ((count_of(table, &g) as f64 + alpha) / (total as f64 + alpha * v))
                            .ln();
                    }
                }
            }
            lp
        })
        .collect()
}

/// Visible first-order chain over chars with add-`alpha` smoothing across the
/// training alphabet plus one unknown state.
pub fn markov(langs: &[LangTexts], doc: &str, alpha: f64) -> Vec<f64> {
    let alphabet: BTreeSet<char> = langs.iter().flatten().flat_map(|t| t.chars()).collect();
    let s = alphabet.len() as f64 + 1.0;
    let unk = '\u{0}';
    let state = |c: char| if alphabet.contains(&c) { c } else { unk };
    let seq: Vec<char> = doc.chars().map(state).collect();
    langs
        .iter()
        .map(|texts| {
            let seqs: Vec<Vec<char>> = texts.iter().map(|t| t.chars().collect()).collect();
            let starts = seqs.iter().filter(|q| !q.is_empty()).count() as f64;
            let first = seqs.iter().filter(|q| q.first() == Some(&seq[0])).count() as f64;
            let mut lp = ((first + alpha) / (starts + alpha * s)).ln();
            for w in seq.windows(2) {
                let (mut pair, mut row) = (0.0, 0.0);
                for q in &seqs {
                    for v in q.windows(2) {
                        if v[0] == w[0] {
                            row += 1.0;
                            if v[1] == w[1] {
                                pair += 1.0;
                            }
                        }
                    }
                }
                lp += ((pair + alpha) / (row + alpha * s)).ln();
            }
            lp
        })
        .collect()
}

/// Byte grams of orders `n_min..=n_max` kept by one language after the 62%
/// extension filter and the top-`k` cut, with full per-order totals.
pub fn varbyte_profile(
    texts: &[String],
    n_min: usize,
    n_max: usize,
    k: usize,
) -> (ByteTable, BTreeMap<usize, u64>) {
    let orders: Vec<ByteTable> = (n_min..=n_max)
        .map(|n| byte_gram_counts(texts, n))
        .collect();
    let totals = (n_min..=n_max)
        .zip(&orders)
        .map(|(n, t)| (n, t.iter().map(|e| e.1).sum()))
        .collect();
    let mut kept: ByteTable = Vec::new();
    for (i, table) in orders.iter().enumerate() {
        for (g, c) in table {
            let dominated = orders.get(i + 1).is_some_and(|longer| {
                longer
                    .iter()
                    .any(|(h, d)| (h.starts_with(g) || h.ends_with(g)) && 100 * d >= 62 * c)
            });
            if !dominated {
                kept.push((g.clone(), *c));
            }
        }
    }
    kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    kept.truncate(k);
    (kept, totals)
}

/// Sum of `n * count / total_n` over document byte grams in the kept set.
pub fn varbyte(langs: &[LangTexts], doc: &str, n_min: usize, n_max: usize, k: usize) -> Vec<f64> {
    langs
        .iter()
        .map(|texts| {
            let (kept, totals) = varbyte_profile(texts, n_min, n_max, k);
            let mut score = 0.0;
            for n in n_min..=n_max {
                for g in byte_windows(doc, n) {
                    let c = count_of(&kept, &g);
                    if c > 0 {
                        score += n as f64 * c as f64 / totals[&n] as f64;
                    }
                }
            }
            score
        })
        .collect()
}

/// Accuracy and macro-F1 recounted from raw `(gold, predicted)` pairs. With
/// `all_labels` the average runs over `labels`, otherwise over gold classes.
pub fn accuracy_and_macro_f1(
    labels: &[String],
    pairs: &[(String, String)],
    all_labels: bool,
) -> (f64, f64) {
    let correct = pairs.iter().filter(|(g, p)| g == p).count();
    let accuracy = if pairs.is_empty() {
        0.0
    } else {
        correct as f64 / pairs.len() as f64
    };
    let classes: Vec<&String> = labels
        .iter()
        .filter(|l| all_labels || pairs.iter().any(|(g, _)| g == *l))
        .collect();
    let mut f1_sum = 0.0;
    for class in &classes {
        let tp = pairs
            .iter()
            .filter(|(g, p)| g == *class && p == *class)
            .count() as f64;
        let fp = pairs
            .iter()
            .filter(|(g, p)| g != *class && p == *class)
            .count() as f64;
        let fn_ = pairs
            .iter()
            .filter(|(g, p)| g == *class && p != *class)
            .count() as f64;
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
        if precision + recall > 0.0 {
            f1_sum += 2.0 * precision * recall / (precision + recall);
        }
    }
    let macro_f1 = if classes.is_empty() {
        0.0
    } else {
        f1_sum / classes.len() as f64
    };
    (accuracy, macro_f1)
}

/// Greedy BPE merges recounting every pair from scratch after each merge.
/// Words are split on single spaces; `eow` terminates each word.
pub fn bpe_merges(
    texts: &[String],
    target_vocab: usize,
    min_pair_frequency: u64,
    eow: char,
) -> Vec<(String, String)> {
    let mut words: Vec<Vec<String>> = Vec::new();
    for text in texts {
        for w in text.split(' ').filter(|w| !w.is_empty()) {
            let mut symbols: Vec<String> = w.chars().map(String::from).collect();
            symbols.push(eow.to_string());
            words.push(symbols);
        }
    }
    let mut vocab: BTreeSet<String> = words.iter().flatten().cloned().collect();
    let mut merges = Vec::new();
    while vocab.len() < target_vocab {
        let mut pairs: Vec<((String, String), u64)> = Vec::new();
        for w in &words {
            for v in w.windows(2) {
                let key = (v[0].clone(), v[1].clone());
                match pairs.iter_mut().find(|(k, _)| *k == key) {
                    Some(e) => e.1 += 1,
                    None => pairs.push((key, 1)),
                }
            }
        }
        let best = pairs.into_iter().min_by(|a, b| {
            b.1.cmp(&a.1)
                .then_with(|| format!("{}{}", a.0 .0, a.0 .1).cmp(&format!("{}{}", b.0 .0, b.0 .1)))
                .then_with(|| a.0.cmp(&b.0))
        });
        let Some(((left, right), count)) = best else {
            break;
        };
        if count < min_pair_frequency.max(1) {
            break;
        }
        for w in words.iter_mut() {
            let mut out = Vec::new();
            let mut i = 0;
            while i < w.len() {
                if i + 1 < w.len() && w[i] == left && w[i + 1] == right {
                    out.push(format!("{left}{right}"));
                    i += 2;
                } else {
                    out.push(w[i].clone());
                    i += 1;
                }
            }
            *w = out;
        }
        vocab.insert(format!("{left}{right}"));
        merges.push((left, right));
    }
    merges
}
