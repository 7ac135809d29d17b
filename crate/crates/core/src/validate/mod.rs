//! Post-training audits of learned and closed-form energies.

mod audits;
mod ellipticity;
mod search;
mod tangents;

pub use audits::*;
pub use ellipticity::*;
pub use search::*;
pub use tangents::*;
