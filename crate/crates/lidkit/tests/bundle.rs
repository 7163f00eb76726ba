use lidkit::bundle::{encode_bundle, MAGIC};
use lidkit::{load_bundle, read_bundle, save_bundle, write_bundle, LidError};
use lidkit_core::classify::{TokenizerConfig, TrainConfig};
use lidkit_core::{train, LanguageModel, Method, TokenUnit};
use lidkit_testkit::corpus::{codes, latin_alphabet, markov_corpus, rng, tiny_text};

fn corpus() -> Vec<(String, String)> {
    let mut rows = markov_corpus(&codes(3), &latin_alphabet(), 40, 15, 7);
    // symbols that need escaping in the bundle
    rows.push(("laa".into(), "a<b \\c </w> d\u{7f}e \u{1}x".into()));
    rows.push(("lab".into(), "tab\there \u{E000} <<".into()));
    rows
}

fn model(method: Method, unit: TokenUnit) -> LanguageModel {
    let mut config = TrainConfig::new(method.default_params());
    config.tokenizer = TokenizerConfig {
        unit,
        bpe_vocab: 80,
        ..TokenizerConfig::default()
    };
    if let lidkit_core::MethodParams::VarByte(p) = &mut config.params {
        p.k = 300;
    }
    train(&corpus(), &config, None).unwrap()
}

fn all_models() -> Vec<LanguageModel> {
    let mut out = Vec::new();
    for method in Method::ALL {
        out.push(model(method, TokenUnit::Char));
    }
    out.push(model(Method::Heli, TokenUnit::Word));
    out.push(model(Method::RankDistance, TokenUnit::Bpe));
    out.push(model(Method::Markov, TokenUnit::Bpe));
    out
}

fn inputs() -> Vec<String> {
    let mut r = rng(99);
    let mut alphabet = latin_alphabet();
    alphabet.extend(['<', '\\', 'é', 'ж', ' ']);
    (0..100).map(|_| tiny_text(&mut r, &alphabet, 40)).collect()
}

#[test]
fn every_method_round_trips_exactly() {
    let texts = inputs();
    for m in all_models() {
        let text = encode_bundle(&m);
        let loaded = read_bundle(text.as_bytes()).unwrap_or_else(|e| panic!("{}: {e}", m.method()));
        assert_eq!(loaded, m, "{}", m.method());
        assert_eq!(encode_bundle(&loaded), text, "{}", m.method());
        for t in &texts {
            let a = m.identify(t, 3);
            let b = loaded.identify(t, 3);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    for (x, y) in a.iter().zip(&b) {
                        assert_eq!(x.code, y.code);
                        assert_eq!(x.raw_score.to_bits(), y.raw_score.to_bits());
                        assert_eq!(x.confidence.to_bits(), y.confidence.to_bits());
                    }
                }
                (a, b) => assert_eq!(a.is_err(), b.is_err()),
            }
        }
    }
}

#[test]
fn files_and_gzip() {
    let dir = tempfile::tempdir().unwrap();
    let m = model(Method::NaiveBayes, TokenUnit::Char);
    let plain = dir.path().join("m.lid");
    let packed = dir.path().join("m.lid.gz");
    save_bundle(&m, &plain, false).unwrap();
    save_bundle(&m, &packed, true).unwrap();
    let bytes = std::fs::read(&packed).unwrap();
    assert_eq!(&bytes[..2], &[0x1f, 0x8b]);
    assert_eq!(load_bundle(&plain).unwrap(), m);
    assert_eq!(load_bundle(&packed).unwrap(), m);

    let again = dir.path().join("again.lid");
    save_bundle(&load_bundle(&plain).unwrap(), &again, false).unwrap();
    assert_eq!(
        std::fs::read(&plain).unwrap(),
        std::fs::read(&again).unwrap()
    );

    let mut buf = Vec::new();
    write_bundle(&m, &mut buf, false).unwrap();
    assert_eq!(buf, std::fs::read(&plain).unwrap());
}

#[test]
fn unwritable_path_is_an_io_error() {
    let m = model(Method::Liga, TokenUnit::Char);
    let err = save_bundle(&m, std::path::Path::new("/nonexistent-dir/x/m.lid"), false).unwrap_err();
    assert!(matches!(err, LidError::Io { .. }), "{err}");
}

#[test]
fn bad_magic() {
    let text = encode_bundle(&model(Method::Liga, TokenUnit::Char));
    let broken = text.replacen(MAGIC, "AFLIDMB2", 1);
    assert!(matches!(
        read_bundle(broken.as_bytes()),
        Err(LidError::BadMagic)
    ));
    assert!(matches!(read_bundle(b""), Err(LidError::BadMagic)));
    assert!(matches!(read_bundle(b"hello\n"), Err(LidError::BadMagic)));
}

#[test]
fn future_version() {
    let text = encode_bundle(&model(Method::Markov, TokenUnit::Char));
    let broken = text.replacen("format_version\t1\n", "format_version\t99\n", 1);
    match read_bundle(broken.as_bytes()) {
        Err(LidError::UnsupportedVersion(v)) => assert_eq!(v, "99"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn truncation_is_a_corrupt_table() {
    for m in all_models() {
        let text = encode_bundle(&m);
        let lines: Vec<&str> = text.lines().collect();
        for keep in [3, lines.len() / 2, lines.len() - 1] {
            let cut: String = lines[..keep].iter().map(|l| format!("{l}\n")).collect();
            let err = read_bundle(cut.as_bytes()).unwrap_err();
            assert!(
                matches!(err, LidError::CorruptTable { .. }),
                "{}: {err}",
                m.method()
            );
        }
        // cut in the middle of a line
        let err = read_bundle(&text.as_bytes()[..text.len() - 3]).unwrap_err();
        assert!(matches!(err, LidError::CorruptTable { .. }), "{err}");
    }
}

#[test]
fn tampered_tables_are_rejected() {
    let text = encode_bundle(&model(Method::Heli, TokenUnit::Char));
    // unsorted labels
    let swapped = text.replacen("laa\nlab\n", "lab\nlaa\n", 1);
    assert!(matches!(
        read_bundle(swapped.as_bytes()),
        Err(LidError::CorruptTable { .. })
    ));
    let bad_code = text.replacen("[labels]\nlaa\n", "[labels]\nLAA\n", 1);
    assert!(matches!(
        read_bundle(bad_code.as_bytes()),
        Err(LidError::CorruptTable { .. })
    ));
    // a count that is not a number
    let line = text.lines().find(|l| l.starts_with("gram\t")).unwrap();
    let bad = line.rsplit_once('\t').unwrap().0.to_string() + "\tmany";
    assert!(matches!(
        read_bundle(text.replacen(line, &bad, 1).as_bytes()),
        Err(LidError::CorruptTable { .. })
    ));
    // trailing garbage
    let extra = format!("{text}junk\n");
    assert!(matches!(
        read_bundle(extra.as_bytes()),
        Err(LidError::CorruptTable { .. })
    ));
}

#[test]
fn layout_starts_with_the_header() {
    let text = encode_bundle(&model(Method::RankDistance, TokenUnit::Bpe));
    let head: Vec<&str> = text.lines().take(8).collect();
    assert_eq!(
        head,
        [
            "AFLIDMB1",
            "format_version\t1",
            "method\trank",
            "[tokenizer]",
            "case_fold\t1",
            "form\tcomposed",
            "unit\tbpe",
            "[bpe]"
        ]
    );
    assert!(text.ends_with("[end]\n"));
    assert!(!text.contains('\r'));
}
