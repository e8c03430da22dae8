//! Well-founded relations, finite trees, game ranks and index trees.

pub mod finite;
pub mod game;
pub mod index;
pub mod relation;

pub use finite::FiniteTree;
pub use game::{GameRanks, GameSpec};
pub use index::{IndexTree, Part};
pub use relation::{Iteration, Relation};
