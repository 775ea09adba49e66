//! Expansion planning for coupled power, natural gas and hydrogen systems
//! with hydrogen blending in gas pipelines.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod backend;
pub mod error;
pub mod formulation;
pub mod physics;
pub mod system;
pub mod temporal;

mod table;

pub use error::{Error, Result};
