//! Tensor algebra and finite-strain kinematics.

mod fourth;
mod kinematics;
mod linalg;
mod second;

pub use fourth::*;
pub use kinematics::*;
pub use linalg::sym_eigenvalues;
pub use second::*;
