//! Sobolev losses, constraint penalties and the training loop.

mod driver;
mod loss;
mod nadam;

pub use driver::*;
pub use loss::*;
pub use nadam::*;
