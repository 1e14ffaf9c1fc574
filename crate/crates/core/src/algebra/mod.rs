//! Arithmetic substrate shared by both scheme families.

pub mod bytes;
mod dlog;
mod fixed_base;
mod gaussian;
mod group;
pub mod modular;
mod ring;
pub mod seed;

pub use dlog::{bounded_dlog, BabyStepTable, DlogWindow};
pub use fixed_base::FixedBaseTable;
pub use gaussian::GaussianParams;
pub use group::{group_gen, GroupParams};
pub use ring::{BigRing, ModRing, WordRing};
