//! Countable flat modules as colimits of finite free modules, and their
//! `Ext(−, R)` invariants read off the dual tower.

pub mod dual;
pub mod resolution;
pub mod sigma;
pub mod spec;
pub mod wedge;
pub mod xi;

pub use dual::{coreduced_check, dual_tower, is_projective, r_projective_length, ExtReport};
pub use resolution::{phantom_resolution, PhantomReport};
pub use sigma::{sigma_partial, SigmaPartial};
pub use spec::{tree_length_certificate, ColimSpec, ColimTail, Construction, PAdicDigits, Stage};
pub use wedge::{gap_module, wedge_sum, wedge_sum_with_purity};
pub use xi::{xi_checks, xi_module};
