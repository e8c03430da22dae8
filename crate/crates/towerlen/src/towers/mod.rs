//! Towers of finitely generated free modules and their derived towers.

pub mod fishbone;
pub mod spec;
pub mod tower;
pub mod verdict;

pub use fishbone::{fishbone_build, fishbone_verify, FishboneVerifyReport, StraightnessReport};
pub use spec::{Level, Tail, TowerSpec};
pub use tower::{Derived, Exactness, Tower};
pub use verdict::{Depths, LengthBound, LengthReport, Scope, Tri, Verdict};
