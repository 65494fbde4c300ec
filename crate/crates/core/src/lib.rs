//! Numerical verification of interior, Harnack and global estimates for
//! `Δu = gu + f` with data in the Zygmund class `L ln L`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimates;
pub mod pde;
pub mod quad;
pub mod rearrange;
pub mod report;
pub mod surface;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::VerdictReport;
