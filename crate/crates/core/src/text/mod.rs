//! Text preparation: normalization, script detection and tokenization.

mod bpe;
mod script;
mod tokenize;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use unicode_normalization::UnicodeNormalization;

pub use self::bpe::{bpe_encode, bpe_train, bpe_train_with, decode_bpe, BpeModel, END_OF_WORD};
pub use self::script::{detect_script, ScriptProfile, ScriptRanges};
pub use self::tokenize::{tokenize_chars, tokenize_words};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NormForm {
    /// Canonical composition (NFC).
    #[default]
    Composed,
    /// Canonical decomposition (NFD).
    Decomposed,
}

impl NormForm {
    pub fn name(self) -> &'static str {
        match self {
            NormForm::Composed => "composed",
            NormForm::Decomposed => "decomposed",
        }
    }
}

impl FromStr for NormForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "composed" | "nfc" => Ok(NormForm::Composed),
            "decomposed" | "nfd" => Ok(NormForm::Decomposed),
            _ => Err(alloc::format!("unknown normalization form `{s}`")),
        }
    }
}

/// Text known to be in one canonical normalization form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalizedText {
    text: String,
    form: NormForm,
}

impl NormalizedText {
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn form(&self) -> NormForm {
        self.form
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

impl fmt::Display for NormalizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

pub fn normalize(text: &str, form: NormForm) -> NormalizedText {
    let text = match form {
        NormForm::Composed => text.nfc().collect(),
        NormForm::Decomposed => text.nfd().collect(),
    };
    NormalizedText { text, form }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenUnit {
    Char,
    Word,
    Bpe,
}

impl TokenUnit {
    pub fn name(self) -> &'static str {
        match self {
            TokenUnit::Char => "char",
            TokenUnit::Word => "word",
            TokenUnit::Bpe => "bpe",
        }
    }
}

impl FromStr for TokenUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "char" => Ok(TokenUnit::Char),
            "word" => Ok(TokenUnit::Word),
            "bpe" => Ok(TokenUnit::Bpe),
            _ => Err(alloc::format!("unknown token unit `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub unit: TokenUnit,
    pub tokens: Vec<String>,
    /// Unicode scalar values in the normalized source.
    pub source_len: usize,
}

impl TokenStream {
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Splits the stream into the unit sequences n-grams are taken over.
    ///
    /// Char streams are one sequence of characters (whitespace already collapsed
    /// to a single space). Word streams yield the characters of each word. BPE
    /// streams yield the subword tokens of each word, end-of-word marker removed.
    pub fn segments(&self) -> Vec<Vec<&str>> {
        match self.unit {
            TokenUnit::Char => {
                if self.tokens.is_empty() {
                    Vec::new()
                } else {
                    alloc::vec![self.tokens.iter().map(String::as_str).collect()]
                }
            }
            TokenUnit::Word => self
                .tokens
                .iter()
                .map(|w| {
                    w.char_indices()
                        .map(|(i, c)| &w[i..i + c.len_utf8()])
                        .collect()
                })
                .collect(),
            TokenUnit::Bpe => {
                let mut out = Vec::new();
                let mut word: Vec<&str> = Vec::new();
                for tok in &self.tokens {
                    match tok.strip_suffix(END_OF_WORD) {
                        Some(stem) => {
                            if !stem.is_empty() {
                                word.push(stem);
                            }
                            if !word.is_empty() {
                                out.push(core::mem::take(&mut word));
                            }
                        }
                        None => word.push(tok),
                    }
                }
                if !word.is_empty() {
                    out.push(word);
                }
                out
            }
        }
    }
}

/// How raw text becomes a token stream for one model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerSpec {
    pub unit: TokenUnit,
    pub form: NormForm,
    pub case_fold: bool,
    /// Present exactly when `unit` is [`TokenUnit::Bpe`].
    pub bpe: Option<BpeModel>,
}

impl Default for TokenizerSpec {
    fn default() -> Self {
        TokenizerSpec {
            unit: TokenUnit::Char,
            form: NormForm::Composed,
            case_fold: true,
            bpe: None,
        }
    }
}

impl TokenizerSpec {
    pub fn chars() -> Self {
        Self::default()
    }

    pub fn words() -> Self {
        TokenizerSpec {
            unit: TokenUnit::Word,
            ..Self::default()
        }
    }

    /// Case-folds (when enabled) and normalizes to the configured form.
    pub fn prepare(&self, raw: &str) -> NormalizedText {
        if self.case_fold {
            normalize(&raw.to_lowercase(), self.form)
        } else {
            normalize(raw, self.form)
        }
    }

    pub fn tokenize(&self, text: &NormalizedText) -> TokenStream {
        match self.unit {
            TokenUnit::Char => tokenize_chars(text),
            TokenUnit::Word => tokenize_words(text),
            TokenUnit::Bpe => match &self.bpe {
                Some(model) => bpe_encode(model, text),
                None => bpe_encode(&BpeModel::empty(), text),
            },
        }
    }
}

/// Drops URLs and `@handles` from social-media text, joining what is left with
/// single spaces.
pub fn clean_social(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for tok in text.split_whitespace() {
        let lower = tok.to_ascii_lowercase();
        if lower.starts_with("http://")
            || lower.starts_with("https://")
            || lower.starts_with("www.")
            || tok.starts_with('@')
        {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(tok);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn decomposes_and_composes_a_umlaut() {
        assert_eq!(
            normalize("\u{e4}", NormForm::Decomposed).as_str(),
            "a\u{308}"
        );
        assert_eq!(normalize("a\u{308}", NormForm::Composed).as_str(), "\u{e4}");
        for form in [NormForm::Composed, NormForm::Decomposed] {
            assert_eq!(normalize("abc", form).as_str(), "abc");
        }
    }

    #[test]
    fn prepare_folds_case_before_normalizing() {
        let spec = TokenizerSpec::default();
        assert_eq!(spec.prepare("A\u{308}B").as_str(), "\u{e4}b");
        let keep = TokenizerSpec {
            case_fold: false,
            ..TokenizerSpec::default()
        };
        assert_eq!(keep.prepare("AB").as_str(), "AB");
    }

    #[test]
    fn segments_per_unit() {
        let text = normalize("ab  cd", NormForm::Composed);
        let chars = tokenize_chars(&text);
        assert_eq!(chars.segments(), vec![vec!["a", "b", " ", "c", "d"]]);
        let words = tokenize_words(&text);
        assert_eq!(words.segments(), vec![vec!["a", "b"], vec!["c", "d"]]);
        let bpe = TokenStream {
            unit: TokenUnit::Bpe,
            tokens: ["aa", "b", &END_OF_WORD.to_string(), "c\u{e000}"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            source_len: 5,
        };
        assert_eq!(bpe.segments(), vec![vec!["aa", "b"], vec!["c"]]);
    }

    #[test]
    fn social_cleanup() {
        assert_eq!(
            clean_social("@user ni https://t.co/x ojo  www.a.b daadaa"),
            "ni ojo daadaa"
        );
    }

    #[test]
    fn parse_enum_names() {
        assert_eq!("NFD".parse::<NormForm>().unwrap(), NormForm::Decomposed);
        assert_eq!("bpe".parse::<TokenUnit>().unwrap(), TokenUnit::Bpe);
        assert!("bytes".parse::<TokenUnit>().is_err());
    }
}
