//! Exact computations with gapped filtered A∞ and L∞ algebras over
//! truncated Novikov coefficients.

pub mod ainfinity;
pub mod ce_dual;
pub mod cli;
pub mod cyclic;
pub mod error;
pub mod examples;
pub mod hochschild;
pub mod linfinity;
pub mod novikov;
pub mod window;
pub mod words;
