use alloc::string::{String, ToString};
use alloc::vec::Vec;

use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use super::{NormalizedText, TokenStream, TokenUnit};

/// One token per scalar value. Whitespace runs become a single `" "` token and
/// leading or trailing whitespace is dropped.
pub fn tokenize_chars(text: &NormalizedText) -> TokenStream {
    let src = text.as_str();
    let mut tokens = Vec::new();
    let mut pending_space = false;
    for c in src.chars() {
        if c.is_whitespace() {
            pending_space = !tokens.is_empty();
            continue;
        }
        if pending_space {
            tokens.push(" ".to_string());
            pending_space = false;
        }
        tokens.push(c.to_string());
    }
    TokenStream {
        unit: TokenUnit::Char,
        tokens,
        source_len: src.chars().count(),
    }
}

pub(crate) fn is_word_break(c: char) -> bool {
    c.is_whitespace()
        || c.is_control()
        || c.general_category_group() == GeneralCategoryGroup::Punctuation
}

/// Maximal runs of scalars that are neither whitespace, punctuation nor
/// control characters.
pub fn tokenize_words(text: &NormalizedText) -> TokenStream {
    let src = text.as_str();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in src.chars() {
        if is_word_break(c) {
            if !current.is_empty() {
                tokens.push(core::mem::take(&mut current));
            }
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    TokenStream {
        unit: TokenUnit::Word,
        tokens,
        source_len: src.chars().count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{normalize, NormForm};
    use alloc::vec;

    fn chars(s: &str) -> Vec<String> {
        tokenize_chars(&normalize(s, NormForm::Composed)).tokens
    }

    fn words(s: &str) -> Vec<String> {
        tokenize_words(&normalize(s, NormForm::Composed)).tokens
    }

    #[test]
    fn char_tokens() {
        assert_eq!(chars("ab"), vec!["a", "b"]);
        assert_eq!(chars("a  b"), vec!["a", " ", "b"]);
        assert_eq!(chars(" \ta\n"), vec!["a"]);
        assert!(chars("   ").is_empty());
    }

    #[test]
    fn decomposed_umlaut_is_two_tokens() {
        let stream = tokenize_chars(&normalize("\u{e4}", NormForm::Decomposed));
        assert_eq!(stream.tokens, vec!["a", "\u{308}"]);
        assert_eq!(stream.source_len, 2);
    }

    #[test]
    fn word_tokens() {
        assert_eq!(words("a b"), vec!["a", "b"]);
        assert_eq!(words("a, b."), vec!["a", "b"]);
        assert!(words("").is_empty());
        assert_eq!(words("ọ̀rẹ́ mi፣ ሰላም።"), vec!["ọ̀rẹ́", "mi", "ሰላም"]);
    }
}
