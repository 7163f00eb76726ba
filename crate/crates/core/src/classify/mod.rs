//! Trainable language identifiers behind one train/identify surface.
//!
//! Every method turns a prepared [`Document`] into one raw score per language.
//! Distance methods (rank distance, HeLI) prefer low scores, the others prefer
//! high ones. [`rank_predictions`] turns raw scores into a sorted list with
//! softmax confidences.

mod heli;
mod liga;
mod markov;
mod naive_bayes;
mod params;
mod rank;
mod varbyte;

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::hash::Hash;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::registry::{is_valid_code, Registry};
use crate::text::{
    bpe_train_with, tokenize_chars, NormForm, NormalizedText, TokenStream, TokenUnit, TokenizerSpec,
};

pub use self::heli::HeliModel;
pub use self::liga::{LigaModel, LIGA_ORDERS};
pub use self::markov::MarkovModel;
pub use self::naive_bayes::NaiveBayesModel;
pub use self::params::{
    HeliParams, LigaParams, MarkovParams, Method, MethodParams, NaiveBayesParams, RankParams,
    VarByteParams,
};
pub use self::rank::RankDistanceModel;
pub use self::varbyte::{
    extension_violations, filter_extensions, VarByteModel, EXTENSION_RATIO_PERCENT,
};

/// Inputs shorter than this (in scalars) get a reliability warning.
pub const SHORT_INPUT_SCALARS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreDirection {
    /// Distances: the lowest raw score ranks first.
    LowerIsBetter,
    /// Scores and log-probabilities: the highest raw score ranks first.
    HigherIsBetter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub code: String,
    pub raw_score: f64,
    pub confidence: f64,
}

/// A text after normalization and tokenization for one model.
#[derive(Debug, Clone)]
pub struct Document {
    pub text: NormalizedText,
    pub stream: TokenStream,
    /// Whitespace-collapsed text; byte-gram methods read its UTF-8 bytes.
    pub collapsed: String,
}

impl Document {
    pub fn new(tokenizer: &TokenizerSpec, raw: &str) -> Document {
        let text = tokenizer.prepare(raw);
        let chars = tokenize_chars(&text);
        let collapsed = chars.tokens.concat();
        let stream = if tokenizer.unit == TokenUnit::Char {
            chars
        } else {
            tokenizer.tokenize(&text)
        };
        Document {
            text,
            stream,
            collapsed,
        }
    }

    /// The unit sequence fed to the Markov chain: segments joined by a space.
    pub fn unit_sequence(&self) -> Vec<&str> {
        let segments = self.stream.segments();
        if self.stream.unit == TokenUnit::Char {
            return segments.into_iter().next().unwrap_or_default();
        }
        let mut out = Vec::new();
        for (i, seg) in segments.into_iter().enumerate() {
            if i > 0 {
                out.push(" ");
            }
            out.extend(seg);
        }
        out
    }

    pub fn scalar_len(&self) -> usize {
        self.collapsed.chars().count()
    }
}

/// Tokenizer choices made before training; BPE merges are learned from the
/// training corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub unit: TokenUnit,
    pub form: NormForm,
    pub case_fold: bool,
    pub bpe_vocab: usize,
    pub bpe_min_pair_frequency: u64,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            unit: TokenUnit::Char,
            form: NormForm::Composed,
            case_fold: true,
            bpe_vocab: 2000,
            bpe_min_pair_frequency: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub params: MethodParams,
    pub tokenizer: TokenizerConfig,
    /// Softmax temperature used for confidences.
    pub temperature: f64,
}

impl TrainConfig {
    pub fn new(params: MethodParams) -> Self {
        TrainConfig {
            params,
            tokenizer: TokenizerConfig::default(),
            temperature: 1.0,
        }
    }

    pub fn with_tokenizer(mut self, tokenizer: TokenizerConfig) -> Self {
        self.tokenizer = tokenizer;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    RankDistance(RankDistanceModel),
    Heli(HeliModel),
    Liga(LigaModel),
    NaiveBayes(NaiveBayesModel),
    Markov(MarkovModel),
    VarByte(VarByteModel),
}

impl ModelKind {
    pub fn method(&self) -> Method {
        match self {
            ModelKind::RankDistance(_) => Method::RankDistance,
            ModelKind::Heli(_) => Method::Heli,
            ModelKind::Liga(_) => Method::Liga,
            ModelKind::NaiveBayes(_) => Method::NaiveBayes,
            ModelKind::Markov(_) => Method::Markov,
            ModelKind::VarByte(_) => Method::VarByte,
        }
    }

    pub fn params(&self) -> MethodParams {
        match self {
            ModelKind::RankDistance(m) => MethodParams::RankDistance(m.params().clone()),
            ModelKind::Heli(m) => MethodParams::Heli(m.params().clone()),
            ModelKind::Liga(m) => MethodParams::Liga(m.params().clone()),
            ModelKind::NaiveBayes(m) => MethodParams::NaiveBayes(m.params().clone()),
            ModelKind::Markov(m) => MethodParams::Markov(m.params().clone()),
            ModelKind::VarByte(m) => MethodParams::VarByte(m.params().clone()),
        }
    }

    fn label_count(&self) -> usize {
        match self {
            ModelKind::RankDistance(m) => m.language_count(),
            ModelKind::Heli(m) => m.language_count(),
            ModelKind::Liga(m) => m.language_count(),
            ModelKind::NaiveBayes(m) => m.language_count(),
            ModelKind::Markov(m) => m.language_count(),
            ModelKind::VarByte(m) => m.language_count(),
        }
    }
}

/// A trained classifier: tokenizer, sorted labels and per-language tables.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageModel {
    tokenizer: TokenizerSpec,
    labels: Vec<String>,
    temperature: f64,
    kind: ModelKind,
}

impl LanguageModel {
    /// Assembles a model, checking that labels are sorted, unique, valid codes
    /// and match the per-language tables.
    pub fn new(
        tokenizer: TokenizerSpec,
        labels: Vec<String>,
        temperature: f64,
        kind: ModelKind,
    ) -> Result<LanguageModel> {
        if labels.is_empty() {
            return Err(Error::Invariant("model has no labels".into()));
        }
        if !labels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Invariant("labels must be sorted and unique".into()));
        }
        if let Some(bad) = labels.iter().find(|l| !is_valid_code(l)) {
            return Err(Error::MalformedTag(bad.clone()));
        }
        if kind.label_count() != labels.len() {
            return Err(Error::Invariant(format!(
                "{} labels but {} language tables",
                labels.len(),
                kind.label_count()
            )));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::BadParams(format!(
                "temperature {temperature} must be > 0"
            )));
        }
        if (tokenizer.unit == TokenUnit::Bpe) != tokenizer.bpe.is_some() {
            return Err(Error::Invariant(
                "a BPE block is required exactly for the bpe unit".into(),
            ));
        }
        Ok(LanguageModel {
            tokenizer,
            labels,
            temperature,
            kind,
        })
    }

    pub fn method(&self) -> Method {
        self.kind.method()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tokenizer(&self) -> &TokenizerSpec {
        &self.tokenizer
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn direction(&self) -> ScoreDirection {
        self.method().direction()
    }

    pub fn prepare(&self, raw: &str) -> Document {
        Document::new(&self.tokenizer, raw)
    }

    /// Raw score per label, in label order.
    pub fn raw_scores(&self, doc: &Document) -> Result<Vec<f64>> {
        match &self.kind {
            ModelKind::RankDistance(m) => m.scores(doc),
            ModelKind::Heli(m) => m.scores(doc),
            ModelKind::Liga(m) => m.scores(doc),
            ModelKind::NaiveBayes(m) => m.scores(doc),
            ModelKind::Markov(m) => m.scores(doc),
            ModelKind::VarByte(m) => m.scores(doc),
        }
    }

    /// Every label ranked best-first with confidences summing to one.
    pub fn score(&self, raw: &str) -> Result<Vec<Prediction>> {
        let doc = self.prepare(raw);
        let scores = self.raw_scores(&doc)?;
        Ok(rank_predictions(
            &self.labels,
            &scores,
            self.direction(),
            self.temperature,
        ))
    }

    /// The `top_k` best labels for `raw`.
    pub fn identify(&self, raw: &str, top_k: usize) -> Result<Vec<Prediction>> {
        if top_k == 0 {
            return Err(Error::BadParams("top_k must be at least 1".into()));
        }
        let mut ranked = self.score(raw)?;
        ranked.truncate(top_k);
        Ok(ranked)
    }
}

/// True when the text is shorter than [`SHORT_INPUT_SCALARS`] after whitespace
/// collapsing; identification still runs but is less reliable.
pub fn is_short_input(tokenizer: &TokenizerSpec, raw: &str) -> bool {
    Document::new(tokenizer, raw).scalar_len() < SHORT_INPUT_SCALARS
}

fn round12(x: f64) -> f64 {
    libm::round(x * 1e12) / 1e12
}

/// Sorts labels best-first (ties by code) and attaches softmax confidences of
/// `score / tau` (or `-distance / tau`). Scores are compared after rounding to
/// 12 decimals so ties are reproducible.
pub fn rank_predictions(
    labels: &[String],
    raw: &[f64],
    direction: ScoreDirection,
    tau: f64,
) -> Vec<Prediction> {
    debug_assert_eq!(labels.len(), raw.len());
    let logits: Vec<f64> = raw
        .iter()
        .map(|s| match direction {
            ScoreDirection::HigherIsBetter => s / tau,
            ScoreDirection::LowerIsBetter => -s / tau,
        })
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logits.iter().map(|x| libm::exp(x - max)).collect();
    let sum: f64 = weights.iter().sum();
    let mut out: Vec<Prediction> = labels
        .iter()
        .zip(raw)
        .zip(&weights)
        .map(|((code, score), w)| Prediction {
            code: code.clone(),
            raw_score: *score,
            confidence: w / sum,
        })
        .collect();
    out.sort_by(|a, b| {
        let (ra, rb) = (round12(a.raw_score), round12(b.raw_score));
        let by_score = match direction {
            ScoreDirection::HigherIsBetter => rb.partial_cmp(&ra),
            ScoreDirection::LowerIsBetter => ra.partial_cmp(&rb),
        };
        by_score
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.code.cmp(&b.code))
    });
    out
}

/// Gram -> per-language values, for scoring a document with one lookup per gram.
pub(crate) type Postings<K, T> = HashMap<K, Vec<(u32, T)>>;

pub(crate) fn build_postings<K, T>(entries: impl Iterator<Item = (u32, K, T)>) -> Postings<K, T>
where
    K: Hash + Eq,
{
    let mut map: Postings<K, T> = HashMap::new();
    for (lang, key, value) in entries {
        map.entry(key).or_default().push((lang, value));
    }
    map
}

/// Training samples grouped by label, in label order.
pub(crate) struct Grouped {
    pub labels: Vec<String>,
    pub docs: Vec<Vec<Document>>,
}

fn group_corpus<S: AsRef<str>, T: AsRef<str>>(
    corpus: &[(S, T)],
    tokenizer: &TokenizerSpec,
    registry: Option<&Registry>,
) -> Result<Grouped> {
    let mut by_code: BTreeMap<String, Vec<Document>> = BTreeMap::new();
    for (code, text) in corpus {
        let code = code.as_ref();
        if !is_valid_code(code) {
            return Err(Error::MalformedTag(code.to_owned()));
        }
        if let Some(reg) = registry {
            if !reg.contains(code) {
                return Err(Error::UnknownLanguage(code.to_owned()));
            }
        }
        let doc = Document::new(tokenizer, text.as_ref());
        let slot = by_code.entry(code.to_owned()).or_default();
        if !doc.collapsed.is_empty() {
            slot.push(doc);
        }
    }
    if let Some((code, _)) = by_code.iter().find(|(_, docs)| docs.is_empty()) {
        return Err(Error::EmptyClass(code.clone()));
    }
    let (labels, docs) = by_code.into_iter().unzip();
    Ok(Grouped { labels, docs })
}

fn build_tokenizer<S: AsRef<str>, T: AsRef<str>>(
    corpus: &[(S, T)],
    config: &TokenizerConfig,
) -> Result<TokenizerSpec> {
    let mut spec = TokenizerSpec {
        unit: config.unit,
        form: config.form,
        case_fold: config.case_fold,
        bpe: None,
    };
    if config.unit == TokenUnit::Bpe {
        let texts: Vec<NormalizedText> = corpus
            .iter()
            .map(|(_, t)| spec.prepare(t.as_ref()))
            .collect();
        spec.bpe = Some(bpe_train_with(
            &texts,
            config.bpe_vocab,
            config.bpe_min_pair_frequency,
        )?);
    }
    Ok(spec)
}

/// Trains one classifier. Languages are ordered by code; when a registry is
/// given every code must be registered.
pub fn train<S: AsRef<str>, T: AsRef<str>>(
    corpus: &[(S, T)],
    config: &TrainConfig,
    registry: Option<&Registry>,
) -> Result<LanguageModel> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    config.params.validate()?;
    let tokenizer = build_tokenizer(corpus, &config.tokenizer)?;
    let grouped = group_corpus(corpus, &tokenizer, registry)?;
    let kind = match &config.params {
        MethodParams::RankDistance(p) => {
            ModelKind::RankDistance(RankDistanceModel::train(p, &grouped)?)
        }
        MethodParams::Heli(p) => ModelKind::Heli(HeliModel::train(p, &grouped)?),
        MethodParams::Liga(p) => ModelKind::Liga(LigaModel::train(p, &grouped)?),
        MethodParams::NaiveBayes(p) => ModelKind::NaiveBayes(NaiveBayesModel::train(p, &grouped)?),
        MethodParams::Markov(p) => ModelKind::Markov(MarkovModel::train(p, &grouped)?),
        MethodParams::VarByte(p) => ModelKind::VarByte(VarByteModel::train(p, &grouped)?),
    };
    LanguageModel::new(tokenizer, grouped.labels, config.temperature, kind)
}

pub(crate) fn empty_input_unless(cond: bool) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::EmptyInput)
    }
}

pub(crate) fn pad_str(pad: &Option<String>) -> Option<&str> {
    pad.as_deref()
}

pub(crate) fn check_pad(pad: &Option<String>) -> Result<()> {
    match pad {
        Some(p) if p.chars().count() != 1 => Err(Error::BadParams(format!(
            "padding symbol `{p}` must be a single character"
        ))),
        _ => Ok(()),
    }
}

pub(crate) fn default_pad() -> Option<String> {
    Some(crate::profiles::DEFAULT_PAD.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn labels(codes: &[&str]) -> Vec<String> {
        codes.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn equal_scores_split_confidence_and_break_ties_by_code() {
        let preds = rank_predictions(
            &labels(&["bbb", "aaa"]),
            &[2.0, 2.0],
            ScoreDirection::HigherIsBetter,
            1.0,
        );
        assert_eq!(preds[0].code, "aaa");
        assert_eq!(preds[0].confidence, 0.5);
        assert_eq!(preds[1].confidence, 0.5);
    }

    #[test]
    fn singleton_has_full_confidence() {
        let preds = rank_predictions(
            &labels(&["yor"]),
            &[-42.0],
            ScoreDirection::HigherIsBetter,
            1.0,
        );
        assert_eq!(preds[0].confidence, 1.0);
    }

    #[test]
    fn distances_rank_ascending() {
        let preds = rank_predictions(
            &labels(&["aaa", "bbb", "ccc"]),
            &[3.0, 1.0, 2.0],
            ScoreDirection::LowerIsBetter,
            1.0,
        );
        let order: Vec<_> = preds.iter().map(|p| p.code.as_str()).collect();
        assert_eq!(order, vec!["bbb", "ccc", "aaa"]);
        assert!(preds[0].confidence > preds[1].confidence);
        let total: f64 = preds.iter().map(|p| p.confidence).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn near_ties_below_twelve_decimals_are_ties() {
        let preds = rank_predictions(
            &labels(&["aaa", "bbb"]),
            &[1.0, 1.0 + 1e-14],
            ScoreDirection::HigherIsBetter,
            1.0,
        );
        assert_eq!(preds[0].code, "aaa");
    }

    #[test]
    fn grouping_rejects_bad_codes_and_empty_classes() {
        let spec = TokenizerSpec::default();
        let corpus = [("yor", "bawo ni"), ("xx", "abc")];
        assert!(matches!(
            group_corpus(&corpus, &spec, None),
            Err(Error::MalformedTag(_))
        ));
        let corpus = [("yor", "bawo ni"), ("hau", "   ")];
        assert_eq!(
            group_corpus(&corpus, &spec, None).err(),
            Some(Error::EmptyClass("hau".into()))
        );
        let corpus = [("yor", "bawo ni"), ("qqq", "abc")];
        let reg = Registry::builtin();
        assert_eq!(
            group_corpus(&corpus, &spec, Some(&reg)).err(),
            Some(Error::UnknownLanguage("qqq".into()))
        );
    }

    #[test]
    fn unit_sequence_joins_words_with_spaces() {
        let spec = TokenizerSpec::words();
        let doc = Document::new(&spec, "ab, c");
        assert_eq!(doc.unit_sequence(), vec!["a", "b", " ", "c"]);
        let doc = Document::new(&TokenizerSpec::default(), " ab  c ");
        assert_eq!(doc.unit_sequence(), vec!["a", "b", " ", "c"]);
        assert_eq!(doc.collapsed, "ab c");
    }
}
