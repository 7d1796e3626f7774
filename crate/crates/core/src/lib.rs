#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]
extern crate alloc;

pub mod densities;
pub mod error;
pub mod kernels;
pub mod laplace;
pub mod quad;
pub mod sampler;
pub mod specfun;

pub use error::{Error, Result};
