//! Hardy spaces of the real-coefficient conjugate Beltrami equation on
//! circular domains, and the conductivity boundary problems they solve.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod areaops;
pub mod bep;
pub mod circfft;
pub mod dirichlet;
pub mod domain;
pub mod error;

pub use error::{HardyError, Result};
pub mod hardy_nu;
pub mod krylov;
pub mod neumann;
pub mod oracle;
pub mod validation;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
