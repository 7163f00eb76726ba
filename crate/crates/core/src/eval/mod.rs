//! Corpus splitting and evaluation metrics.

mod compare;
mod groups;
mod metrics;
mod split;

pub use self::compare::{compare, Comparison};
pub use self::groups::{group_errors, GroupErrorReport, MemberErrors};
pub use self::metrics::{
    evaluate, ClassMetrics, ConfusionMatrix, EvalReport, F1Histogram, MacroAverage,
};
pub use self::split::{split_corpus, Split, SplitMix64, SplitSpec};
