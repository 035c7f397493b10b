//! Balance and discrepancy of subsets of Z_n and of permutations.

pub mod balance;
pub mod construct;
pub mod error;
pub mod exact;
pub mod patterns;
pub mod permdisc;
pub mod symmetry;
pub mod zn;

pub use error::{Error, Result};
pub use zn::{CyclicInterval, Permutation, ZnMultiset, ZnSubset};
