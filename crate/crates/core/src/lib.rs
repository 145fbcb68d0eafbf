//! Exact computations in James-type tree spaces: norms, dual norms,
//! slices of norming sets and diameter-two certificates.

pub mod certificates;
pub mod duals;
pub mod error;
pub mod lp;
pub mod random;
pub mod rational;
pub mod slices;
pub mod spaces;
pub mod surd;
pub mod tree;
pub mod verify;
pub mod wire;

pub use error::{Error, Result};
pub use rational::Q;
