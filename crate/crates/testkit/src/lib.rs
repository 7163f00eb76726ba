//! Reference oracles and synthetic corpora for tests.
//!
//! Oracles recompute every quantity straight from its formula with plain
//! vectors and linear scans. They share no code with `lidkit-core`, so a test
//! that agrees with them checks the fast path against an independent reading
//! of the definition. Inputs are assumed to be already normalized: lowercase
//! ASCII or other scalars that case folding and NFC leave alone, single spaces
//! between words, no leading or trailing whitespace.

pub mod corpus;
pub mod oracle;
pub use rand;
