//! Exact and numeric tools for studying monotone (nonnegative) rank of
//! matrices and tensors built from squared-distance patterns.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod io;
pub mod models;
pub mod numkit;
pub mod ratlinalg;
pub mod tensor;

pub use error::{Error, Result};
