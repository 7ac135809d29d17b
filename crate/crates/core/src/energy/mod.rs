//! Learned and analytic stored-energy functionals.

pub mod model;
pub mod net;
mod source;

pub use model::{ConjugatePair, ModelBundle, NetConfig, Normalizer, PhysicalJet, Provenance, Tangent};
pub use net::{Activation, Dense, EnergyNet, JetLayout, Layer, MultiplyKind, Order, Tape};
pub use source::{EnergySource, NeoHookean, QuadraticInF, StVenantKirchhoff};
