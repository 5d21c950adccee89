#![allow(clippy::type_complexity)]

//! Signed counts of real polynomials with prescribed real critical values.

pub mod dessin;
pub mod error;
pub mod insertion;
pub mod oracle;
pub mod partition;
pub mod series;
pub mod snumber;
pub mod trees;

pub use error::{Error, Result};
