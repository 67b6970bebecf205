//! Exact-arithmetic machinery for d-orthogonal polynomial sequences.

pub mod casorati;
pub mod cli;
pub mod copoly;
pub mod darboux;
pub mod dsym;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod seq;
pub mod verify;
pub mod zeros;

pub use error::{Error, Result};
pub use poly::Poly;
pub use rational::Rational;
pub use seq::{generate, PolySeq, RecCoeffs};
