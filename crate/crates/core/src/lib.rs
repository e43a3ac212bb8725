pub mod cavitation3d;
pub mod constitutive;
pub mod crack1d;
pub mod error;
pub mod extrapolate;
pub mod mollify;
pub mod ode;
pub mod quadrature;
pub mod runner;
pub mod vacuum1d;
pub mod weakform;

pub use error::{Error, Result};
