use std::collections::BTreeMap;

use lidkit_core::classify::{
    extension_violations, rank_predictions, ScoreDirection, VarByteParams,
};
use lidkit_core::eval::{compare, group_errors, split_corpus, EvalReport, MacroAverage, SplitSpec};
use lidkit_core::profiles::{build_rank_profile, extract_ngrams, relfreq};
use lidkit_core::text::{
    bpe_encode, bpe_train, decode_bpe, detect_script, normalize, tokenize_chars, tokenize_words,
    ScriptRanges,
};
use lidkit_core::{train, MethodParams, NormForm, Registry, Script, TrainConfig};
use lidkit_testkit::oracle;
use proptest::prelude::*;

fn mixed_text() -> impl Strategy<Value = String> {
    // Latin with combining marks, Ethiopic, Arabic, Vai, Coptic, Cyrillic (no
    // tracked script), spaces and punctuation
    proptest::collection::vec(
        prop_oneof![
            proptest::char::range('a', 'z'),
            proptest::char::range('A', 'Z'),
            Just('\u{0301}'),
            Just('\u{0323}'),
            Just('é'),
            Just('ẹ'),
            proptest::char::range('\u{1200}', '\u{1210}'),
            proptest::char::range('\u{0627}', '\u{0630}'),
            proptest::char::range('\u{0430}', '\u{0440}'),
            proptest::char::range('\u{A500}', '\u{A510}'),
            proptest::char::range('\u{2C80}', '\u{2C90}'),
            Just(' '),
            Just('\t'),
            Just('.'),
            Just(','),
        ],
        0..40,
    )
    .prop_map(|v| v.into_iter().collect())
}

fn lower_words() -> impl Strategy<Value = String> {
    "[a-f]{1,6}( [a-f]{1,6}){0,5}"
}

proptest! {
    #[test]
    fn normalization_is_idempotent_and_forms_invert(s in mixed_text()) {
        let c = normalize(&s, NormForm::Composed);
        let d = normalize(&s, NormForm::Decomposed);
        prop_assert_eq!(normalize(c.as_str(), NormForm::Composed).into_string(), c.as_str());
        prop_assert_eq!(normalize(d.as_str(), NormForm::Decomposed).into_string(), d.as_str());
        prop_assert_eq!(normalize(d.as_str(), NormForm::Composed).into_string(), c.as_str());
    }

    #[test]
    fn script_counts_match_a_scalar_scan(s in mixed_text()) {
        let text = normalize(&s, NormForm::Composed);
        let in_range = |c: char, lo: u32, hi: u32| c.is_alphabetic() && (lo..=hi).contains(&(c as u32));
        let mut expected: BTreeMap<Script, u64> = BTreeMap::new();
        for c in text.as_str().chars() {
            let script = if c.is_ascii_alphabetic() || in_range(c, 0xC0, 0x24F) || in_range(c, 0x1E00, 0x1EFF) {
                Some(Script::Latin)
            } else if in_range(c, 0x1200, 0x139F) {
                Some(Script::Ethiopic)
            } else if in_range(c, 0x0600, 0x06FF) {
                Some(Script::Arabic)
            } else if in_range(c, 0xA500, 0xA63F) {
                Some(Script::Vai)
            } else if in_range(c, 0x2C80, 0x2CFF) {
                Some(Script::Coptic)
            } else {
                None
            };
            if let Some(sc) = script {
                *expected.entry(sc).or_insert(0) += 1;
            }
        }
        match detect_script(&text, &ScriptRanges::default()) {
            Ok(profile) => {
                for sc in Script::ALL {
                    prop_assert_eq!(profile.count(sc), expected.get(&sc).copied().unwrap_or(0));
                }
                prop_assert!((0.0..=1.0).contains(&profile.coverage));
            }
            Err(_) => prop_assert!(expected.is_empty()),
        }
    }

    #[test]
    fn char_tokens_rebuild_the_text(s in mixed_text()) {
        let text = normalize(&s, NormForm::Composed);
        let chars = tokenize_chars(&text);
        let words = tokenize_words(&text);
        prop_assert!(chars.tokens.len() >= words.tokens.len());
        let collapsed = text.as_str().split_whitespace().collect::<Vec<_>>().join(" ");
        prop_assert_eq!(chars.tokens.concat(), collapsed);
    }

    #[test]
    fn bpe_is_deterministic_and_round_trips(corpus in proptest::collection::vec(lower_words(), 1..8), probe in lower_words()) {
        let texts: Vec<_> = corpus.iter().map(|t| normalize(t, NormForm::Composed)).collect();
        let a = bpe_train(&texts, 30).unwrap();
        let b = bpe_train(&texts, 30).unwrap();
        prop_assert_eq!(a.merges(), b.merges());
        let probe = normalize(&probe, NormForm::Composed);
        prop_assert_eq!(decode_bpe(&bpe_encode(&a, &probe)), tokenize_words(&probe).tokens);
    }

    #[test]
    fn bpe_matches_the_recounting_oracle(corpus in proptest::collection::vec(lower_words(), 1..6), target in 8usize..40) {
        let texts: Vec<_> = corpus.iter().map(|t| normalize(t, NormForm::Composed)).collect();
        let base: std::collections::BTreeSet<char> = corpus.iter().flat_map(|t| t.chars()).filter(|c| *c != ' ').collect();
        prop_assume!(target > base.len());
        let model = bpe_train(&texts, target).unwrap();
        let want = oracle::bpe_merges(&corpus, target, 2, lidkit_core::text::END_OF_WORD);
        prop_assert_eq!(model.merges(), &want[..]);
    }

    #[test]
    fn ngram_totals_count_every_window(s in "[a-d ]{0,30}", n_min in 1usize..3, extra in 0usize..3) {
        let n_max = n_min + extra;
        let text = normalize(&s, NormForm::Composed);
        let stream = tokenize_chars(&text);
        match extract_ngrams(&stream, n_min, n_max, Some("_")) {
            Ok(counts) => {
                let len = stream.tokens.len() + 2;
                let total: u64 = (n_min..=n_max).map(|n| counts.total(n)).sum();
                prop_assert_eq!(total as usize, oracle::window_count(len, n_min, n_max));
            }
            Err(_) => prop_assert!(stream.tokens.is_empty()),
        }
    }

    #[test]
    fn rank_profiles_are_sorted_truncations(s in "[a-c]{1,30}", max_rank in 1usize..15) {
        let text = normalize(&s, NormForm::Composed);
        let counts = extract_ngrams(&tokenize_chars(&text), 1, 3, Some("_")).unwrap();
        let profile = build_rank_profile(&counts, max_rank);
        prop_assert_eq!(profile.len(), counts.len().min(max_rank));
        let count = |g: &String| (1..=3).map(|n| counts.count(n, g.as_str())).sum::<u64>();
        for w in profile.ordered().windows(2) {
            prop_assert!(count(&w[0]) > count(&w[1]) || (count(&w[0]) == count(&w[1]) && w[0] < w[1]));
        }
        if let Some(last) = profile.ordered().last() {
            let dropped = counts.iter().filter(|(_, g, _)| profile.rank(g.as_str()).is_none());
            for (_, g, c) in dropped {
                prop_assert!(c < count(last) || (c == count(last) && g > last));
            }
        }
    }

    #[test]
    fn unsmoothed_frequencies_sum_to_one(s in "[a-e ]{1,30}") {
        let text = normalize(&s, NormForm::Composed);
        let stream = tokenize_chars(&text);
        prop_assume!(!stream.tokens.is_empty());
        let counts = extract_ngrams(&stream, 1, 3, Some("_")).unwrap();
        let table = relfreq(&counts, 0.0, &BTreeMap::new()).unwrap();
        for n in 1..=3 {
            if let Some(order) = table.order(n) {
                let sum: f64 = order.values().sum();
                prop_assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shifting_scores_changes_nothing(scores in proptest::collection::vec(-50.0f64..50.0, 1..6), shift in -100.0f64..100.0) {
        let labels: Vec<String> = lidkit_testkit::corpus::codes(scores.len());
        for direction in [ScoreDirection::HigherIsBetter, ScoreDirection::LowerIsBetter] {
            // integers keep the shifted comparison exact
            let base: Vec<f64> = scores.iter().map(|s| s.round()).collect();
            let moved: Vec<f64> = base.iter().map(|s| s + shift.round()).collect();
            let a = rank_predictions(&labels, &base, direction, 1.0);
            let b = rank_predictions(&labels, &moved, direction, 1.0);
            for (x, y) in a.iter().zip(&b) {
                prop_assert_eq!(&x.code, &y.code);
                prop_assert!((x.confidence - y.confidence).abs() < 1e-9);
            }
            let sum: f64 = a.iter().map(|p| p.confidence).sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn metrics_match_the_recount(classes in 1usize..=10, picks in proptest::collection::vec((0usize..10, 0usize..10), 0..1000), all in any::<bool>()) {
        let labels = lidkit_testkit::corpus::codes(classes);
        let pairs: Vec<(String, String)> = picks
            .iter()
            .map(|(g, p)| (labels[g % classes].clone(), labels[p % classes].clone()))
            .collect();
        let average = if all { MacroAverage::AllLabels } else { MacroAverage::GoldPresent };
        let report = EvalReport::from_pairs(&labels, &pairs, average).unwrap();
        let (acc, f1) = oracle::accuracy_and_macro_f1(&labels, &pairs, all);
        prop_assert!((report.accuracy - acc).abs() <= 1e-12);
        prop_assert!((report.macro_f1 - f1).abs() <= 1e-12);
        prop_assert_eq!(report.f1_histogram.total() as usize, report.per_class.len());
        for code in &labels {
            prop_assert_eq!(report.confusion.support(code), pairs.iter().filter(|(g, _)| g == code).count() as u64);
        }
        let group: Vec<&String> = labels.iter().take(classes.div_ceil(2)).collect();
        let groups = group_errors(&report, "half", &group).unwrap();
        for m in &groups.members {
            prop_assert!((m.correct + m.within_group + m.others - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn splits_are_reproducible(sizes in proptest::collection::vec(0usize..60, 1..5), seed in any::<u64>()) {
        let codes = lidkit_testkit::corpus::codes(sizes.len());
        let corpus: Vec<(String, String)> = codes
            .iter()
            .zip(&sizes)
            .flat_map(|(c, n)| (0..*n).map(move |i| (c.clone(), format!("{c} {i}"))))
            .collect();
        let spec = SplitSpec { train_n: 20, dev_n: 5, test_n: 5, min_total: 15, seed };
        let a = split_corpus(&corpus, &spec).unwrap();
        prop_assert_eq!(&a, &split_corpus(&corpus, &spec).unwrap());
        let other = split_corpus(&corpus, &SplitSpec { seed: seed.wrapping_add(1), ..spec }).unwrap();
        prop_assert_eq!(a.train.len(), other.train.len());
        prop_assert_eq!(a.test.len(), other.test.len());
        let mut seen: Vec<&(String, String)> = a.train.iter().chain(&a.dev).chain(&a.test).collect();
        let n = seen.len();
        seen.sort();
        seen.dedup();
        prop_assert_eq!(seen.len(), n);
    }

    #[test]
    fn comparisons_never_show_zero_for_missing(a in proptest::collection::btree_map(0usize..6, 0.0f64..1.0, 0..6), b in proptest::collection::btree_map(0usize..6, 0.0f64..1.0, 0..6)) {
        let codes = lidkit_testkit::corpus::codes(6);
        let tool = |m: &BTreeMap<usize, f64>| m.iter().map(|(k, v)| (codes[*k].clone(), *v)).collect::<BTreeMap<_, _>>();
        let reports: BTreeMap<String, BTreeMap<String, f64>> =
            [("x".to_string(), tool(&a)), ("y".to_string(), tool(&b))].into_iter().collect();
        let table = compare(&reports);
        let rendered = table.render();
        for (code, cells) in &table.rows {
            let line = rendered.lines().find(|l| l.split('\t').next() == Some(code.as_str())).unwrap();
            let fields: Vec<&str> = line.split('\t').skip(1).collect();
            for (tool_name, (cell, field)) in ["x", "y"].iter().zip(cells.iter().zip(&fields)) {
                let supported = reports[*tool_name].contains_key(code);
                prop_assert_eq!(cell.is_some(), supported);
                if !supported {
                    prop_assert_eq!(*field, "-");
                }
            }
        }
        prop_assert!(table.wins.iter().sum::<usize>() + table.ties == table.shared);
    }
}

#[test]
fn registry_tags_round_trip() {
    let reg = Registry::builtin();
    for tag in reg.entries() {
        assert_eq!(reg.parse_tag(&tag.code).unwrap(), tag);
    }
}

#[test]
fn every_method_recognizes_disjoint_alphabets() {
    let alphabets = ["abcdef", "ghijkl", "mnopqr"];
    let mut r = lidkit_testkit::corpus::rng(5);
    let codes = lidkit_testkit::corpus::codes(3);
    let mut corpus = Vec::new();
    for (code, alphabet) in codes.iter().zip(alphabets) {
        let chars: Vec<char> = alphabet.chars().collect();
        for _ in 0..30 {
            corpus.push((
                code.clone(),
                lidkit_testkit::corpus::tiny_text(&mut r, &chars, 20),
            ));
        }
    }
    for method in lidkit_core::Method::ALL {
        let model = train(&corpus, &TrainConfig::new(method.default_params()), None).unwrap();
        if let lidkit_core::classify::ModelKind::VarByte(m) = model.kind() {
            for table in m.counts() {
                assert!(extension_violations(table).is_empty());
            }
        }
        for (code, text) in &corpus {
            if text.chars().count() < 3 {
                continue;
            }
            let best = &model.identify(text, 1).unwrap()[0];
            assert_eq!(&best.code, code, "{method:?} on {text:?}");
        }
    }
}

#[test]
fn varbyte_filter_holds_after_training() {
    let codes = lidkit_testkit::corpus::codes(4);
    let corpus = lidkit_testkit::corpus::markov_corpus(
        &codes,
        &lidkit_testkit::corpus::latin_alphabet(),
        60,
        30,
        9,
    );
    for k in [50, 500, 3000] {
        let params = MethodParams::VarByte(VarByteParams {
            k,
            ..VarByteParams::default()
        });
        let model = train(&corpus, &TrainConfig::new(params), None).unwrap();
        let lidkit_core::classify::ModelKind::VarByte(m) = model.kind() else {
            unreachable!()
        };
        for table in m.counts() {
            assert!(table.len() <= k);
            assert_eq!(
                extension_violations(table),
                Vec::<(Vec<u8>, Vec<u8>)>::new()
            );
        }
    }
}
