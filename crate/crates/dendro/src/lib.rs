//! Finite rooted non-planar trees, colored symmetric operads, dendroidal
//! sets, forests, the operad of elements and its root functor, Boardman–Vogt
//! tensor products, truncated localization, and operadic décalage — all at
//! desk scale, with exhaustive verification suites.

pub mod error;
pub mod perm;
pub mod tree;
pub mod operad;
pub mod dendroidal;
pub mod forest;
pub mod elements;
pub mod tensor;
pub mod decalage;
pub mod algebra;
pub mod verify;

pub use error::{Error, Result};

/// Version tag carried by every JSON document this crate reads or writes.
pub const SCHEMA: &str = "dendro/1";
