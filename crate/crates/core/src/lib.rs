// NaN must fail validation, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collective;
pub mod error;
pub mod field;
pub mod protocol;
pub mod qdyn;
pub mod xprmt;

pub use error::{Error, Result};
