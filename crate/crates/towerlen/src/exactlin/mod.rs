//! Exact integer linear algebra.

pub mod eventual;
pub mod height;
pub mod hnf;
pub mod jint;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod ring;

pub use eventual::{eventual_image, stable_image_intersection, StableImage};
pub use hnf::{hnf, snf, Snf};
pub use lattice::{kernel, quotient_shape, Lattice, QuotientShape};
pub use matrix::Matrix;
pub use ring::BaseRing;

/// `Hom(−, R)` on finite free modules: the transpose.
pub fn dual_map(f: &Matrix) -> Matrix {
    f.transpose()
}
