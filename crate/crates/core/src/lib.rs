#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod greens;
pub mod io;
pub mod rates;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
