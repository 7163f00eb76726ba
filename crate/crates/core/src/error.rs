use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
    #[error("malformed language tag `{0}`: expected three letters")]
    MalformedTag(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate language code `{code}`")]
    DuplicateCode { code: String, line: usize },
    #[error("text contains no characters from a known script")]
    NoScriptContent,
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("input is empty after normalization")]
    EmptyInput,
    #[error("language `{0}` has no usable training samples")]
    EmptyClass(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("gold label `{0}` is not in the model's label set")]
    UnknownGoldLabel(String),
    #[error("group `{0}` is empty")]
    EmptyGroup(String),
    #[error("model invariant violated: {0}")]
    Invariant(String),
}
