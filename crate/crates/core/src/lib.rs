//! Born–Jordan, Weyl and symmetric quantization over an exact operator
//! algebra, plus a laboratory for short-time propagators and classical
//! two-point actions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod convergence;
pub mod error;
pub mod hamilton;
pub mod opalgebra;
pub mod potential;
pub mod propagators;
pub mod quadrature;
pub mod quantizer;

pub use error::{Error, Result};
