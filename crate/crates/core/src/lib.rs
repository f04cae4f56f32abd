//! Finite, witness-backed probes of sparsity properties of sets of natural
//! numbers: signed sumsets and cosets, densities, arithmetic progressions,
//! geometric sparsity, linear equations over a sequence, and linear
//! recurrences with Pisot or Salem characteristic roots.

pub mod arith;
pub mod bigser;
pub mod error;
pub mod sequences;
pub mod sumset;
pub mod density;
pub mod progressions;
pub mod recurrence;
pub mod geometry;
pub mod equations;
pub mod report;

pub use error::{Error, Result};
