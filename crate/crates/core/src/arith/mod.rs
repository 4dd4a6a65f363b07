//! Exact arithmetic over Q and Q(sqrt 13). No floating point except the
//! display-only `to_f64` conversions.

mod quad;
mod rational;

pub use quad::QuadExt;
pub use rational::Rational;
