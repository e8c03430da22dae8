//! Exact derived towers, Mittag-Leffler lengths, tree ranks and Ext
//! invariants of countable flat modules over ℤ and its localizations.

pub mod cli;
pub mod error;
pub mod exactlin;
pub mod modcolim;
pub mod ordinals;
pub mod towers;
pub mod trees;

pub use error::{Error, Result};
