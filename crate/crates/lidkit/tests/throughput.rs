use std::time::Instant;

use lidkit_core::classify::{NaiveBayesParams, TrainConfig};
use lidkit_core::{train, MethodParams};
use lidkit_testkit::corpus::{codes, latin_alphabet, markov_corpus};
use rayon::prelude::*;

/// Smoke bound: a 10-language bigram naive Bayes model identifies at least
/// 10,000 short sentences per second through the batch path the CLI uses.
#[test]
fn bigram_naive_bayes_throughput() {
    let corpus = markov_corpus(&codes(10), &latin_alphabet(), 200, 20, 3);
    let params = MethodParams::NaiveBayes(NaiveBayesParams {
        n_min: 2,
        n_max: 2,
        ..NaiveBayesParams::default()
    });
    let model = train(&corpus, &TrainConfig::new(params), None).unwrap();
    let inputs: Vec<&str> = corpus
        .iter()
        .cycle()
        .take(20_000)
        .map(|(_, t)| t.as_str())
        .collect();

    let start = Instant::now();
    let predicted: Vec<_> = inputs
        .par_iter()
        .map(|t| model.identify(t, 1).unwrap())
        .collect();
    let rate = inputs.len() as f64 / start.elapsed().as_secs_f64();
    assert_eq!(predicted.len(), inputs.len());
    eprintln!("{rate:.0} sentences/s");
    assert!(rate >= 10_000.0, "{rate:.0} sentences/s");
}
