//! File formats and the command line for `lidkit-core`.
//!
//! - [`corpus`]: `code<TAB>text` corpus files
//! - [`bundle`]: the single-file model bundle
//! - [`report`]: evaluation reports as JSON and CSV, comparison inputs
//! - [`cli`]: the `lidkit` binary

pub mod bundle;
pub mod cli;
pub mod corpus;
mod error;
pub mod report;

pub use crate::bundle::{load_bundle, read_bundle, save_bundle, write_bundle};
pub use crate::error::{LidError, Result};
