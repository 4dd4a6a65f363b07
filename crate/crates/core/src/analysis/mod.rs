//! Analysis of restrictions of harmonic functions to edges: monotonicity,
//! one-sided derivatives at junction points, and the third-point zero
//! derivative.

pub mod derivative;
pub mod monotone;
pub mod third_point;

pub use derivative::{
    count_zero_junctions, difference_quotient, integer_relations, junction_derivative,
    ContourPoint, DerivClass, OneSided, Side, ZeroScan,
};
pub use monotone::{
    classify_bottom, classify_edge, dsv_check, edges_by_side_length, locate_extremum,
    simultaneous_monotone, Extremum, ExtremumKind, Monotonicity,
};
pub use third_point::{
    approach_cells, beta_closed_form, gamma_closed_form, third_point_of_subedge,
    third_point_quotient, third_point_quotients, third_point_value, third_point_value_at,
    triangle_sequence, QuotientExpansion, Third, ThirdPointContext, TriangleSequence,
};
