// `!(a > b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex;
mod dd;
pub mod error;
pub mod foxwright;
pub mod fraccalc;
pub mod gamma;
pub mod gmbessel;
pub mod harness;
pub mod identities;

pub use complex::ComplexValue;
pub use error::{Error, Result};
