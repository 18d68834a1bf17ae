//! Numerical toolkit for mixed moments of holomorphic Hecke eigenforms.

pub mod arith;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod lfun;
pub mod modforms;
pub mod special;
pub mod trace;

pub use error::{Error, Result};
