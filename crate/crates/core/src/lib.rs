//! Supervised text scaling with Wordscores, plus the statistics used to
//! validate its output.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! batch pipeline and the command line live in the `wordscores` crate.
//!
//! - [`corpus`]: tokenizing, term-document matrices, stop-word pruning and
//!   overlap diagnostics.
//! - [`scaling`]: word probabilities, word scores, virgin-text scores under
//!   both frequency normalizations, and the LBG / Martin-Vanberg transforms.
//! - [`validation`]: unit rescaling, Pearson and concordance correlation with
//!   confidence intervals, and benchmark comparisons.
//! - [`construct`]: multinomial logit by Newton-Raphson with count R²,
//!   McFadden pseudo-R² and BIC comparison.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod construct;
pub mod corpus;
pub mod error;
pub mod linalg;
pub mod scaling;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
