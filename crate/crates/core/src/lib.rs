//! Finite-n and limiting-SDE engines for critical one-dimensional random
//! Schrödinger operators with a mixed vanishing/decaying potential.

pub mod digest;
pub mod eigensolve;
pub mod error;
pub mod harness;
pub mod model;
pub mod pointproc;
pub mod reference;
pub mod rng;
pub mod sde;
pub mod shape;
pub mod stats;
pub mod transfer;

pub use error::{Error, Result};
pub use model::{ModelSpec, Disorder};
pub use rng::{Purpose, Stream};
