//! File formats, a threaded executor and the command-line front end for
//! `hyperelastic-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod io;

pub use error::{Error, Result};
