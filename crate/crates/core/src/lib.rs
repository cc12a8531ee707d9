#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod channel;
pub mod classical;
pub mod conditional;
pub mod distributions;
pub mod error;
pub mod information;
pub mod monte_carlo;
pub mod path_integral;
pub mod quadrature;
pub mod roots;
pub mod special_fn;

pub use error::{Error, Result};
