//! Exact harmonic functions on the Sierpinski gasket: evaluation by harmonic
//! extension over big rationals, restriction analysis along the boundary
//! edges, and an independent graph-Laplacian oracle.

pub mod analysis;
pub mod arith;
pub mod error;
pub mod gasket;
pub mod oracle;
pub mod suites;

pub use arith::{QuadExt, Rational};
pub use error::{Error, Result};
