use thiserror::Error;

use crate::arith::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse {0:?} as a rational number")]
    ParseRational(String),

    #[error("cannot parse {0:?} as a cell address (expected digits 0, 1, 2)")]
    ParseAddress(String),

    #[error("position {0} is not a dyadic rational in [0, 1]")]
    NonDyadic(Rational),

    #[error("position {0} is neither dyadic nor a sub-edge third point")]
    UnsupportedPoint(Rational),

    #[error("level must be at least {min}, got {got}")]
    LevelTooSmall { min: u32, got: u32 },

    #[error("level {got} exceeds the supported maximum {max}")]
    LevelTooLarge { max: u32, got: u32 },

    #[error("the harmonic function is constant")]
    ConstantFunction,

    #[error("restriction to the {0} edge is monotone; no interior extremum")]
    MonotoneRestriction(crate::gasket::Edge),

    #[error("cell {0} is constant; one-sided derivative class is undefined")]
    ConstantCell(String),

    #[error("address {0} leaves the bottom edge (contains digit 0)")]
    OffBottomEdge(String),

    #[error("closed form left a nonzero sqrt(13) residue: {0}")]
    IrrationalResidue(Rational),

    #[error("missing value at vertex {0}")]
    MissingVertex(usize),

    #[error("linear system is singular")]
    Singular,

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
