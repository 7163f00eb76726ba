//! Language identification primitives that run without the standard library.
//!
//! The crate covers the whole pipeline short of file IO:
//!
//! - [`registry`]: the closed set of identifiable languages and named language groups
//! - [`text`]: Unicode normalization, script detection, char/word/BPE tokenization
//! - [`profiles`]: n-gram counting, rank profiles and smoothed relative frequencies
//! - [`classify`]: six trainable classifiers behind one train/identify surface
//! - [`eval`]: corpus splitting, metrics, grouped error analysis and tool comparison
//!
//! Everything here is deterministic: maps that are iterated are ordered, ties are
//! broken lexicographically and the corpus shuffle uses a fixed generator.

#![no_std]

extern crate alloc;

pub mod classify;
mod error;
pub mod eval;
pub mod profiles;
pub mod registry;
pub mod text;

pub use crate::classify::{
    train, LanguageModel, Method, MethodParams, Prediction, ScoreDirection, TrainConfig,
};
pub use crate::error::{Error, Result};
pub use crate::registry::{Family, LanguageTag, Registry, Script};
pub use crate::text::{NormForm, NormalizedText, TokenStream, TokenUnit, TokenizerSpec};
