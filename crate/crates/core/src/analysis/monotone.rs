//! Monotonicity of restrictions to the edges of `G_0`.
//!
//! On the bottom edge the restriction is strictly increasing exactly when
//! `beta < gamma` and `2 beta - gamma <= alpha <= 2 gamma - beta`; the other
//! edges reduce to this through [`Edge::orient`]. A nonconstant restriction
//! that is not monotone has a single interior extremum, which
//! [`locate_extremum`] brackets by bisecting cells.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::gasket::{extend_once, BoundaryValues, Edge, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Monotonicity {
    Constant,
    StrictlyIncreasing,
    StrictlyDecreasing,
    NonMonotone,
}

impl Monotonicity {
    pub fn is_strict(self) -> bool {
        matches!(
            self,
            Monotonicity::StrictlyIncreasing | Monotonicity::StrictlyDecreasing
        )
    }
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn increasing_condition(bv: &BoundaryValues) -> bool {
    let (a, b, c) = (&bv.alpha, &bv.beta, &bv.gamma);
    b < c && (b * 2 - c) <= *a && *a <= (c * 2 - b)
}

fn decreasing_condition(bv: &BoundaryValues) -> bool {
    let (a, b, c) = (&bv.alpha, &bv.beta, &bv.gamma);
    b > c && (c * 2 - b) <= *a && *a <= (b * 2 - c)
}

/// `(3 beta - delta)(3 gamma - delta) <= 0`, the symmetric form of the
/// monotonicity condition.
fn delta_product_condition(bv: &BoundaryValues) -> bool {
    let delta = bv.delta();
    let lhs = &bv.beta * 3 - &delta;
    let rhs = &bv.gamma * 3 - &delta;
    (lhs * rhs).signum() <= 0
}

/// Classification of the restriction to the bottom edge of the triple.
pub fn classify_bottom(bv: &BoundaryValues) -> Monotonicity {
    if bv.is_constant() {
        return Monotonicity::Constant;
    }
    let class = if increasing_condition(bv) {
        Monotonicity::StrictlyIncreasing
    } else if decreasing_condition(bv) {
        Monotonicity::StrictlyDecreasing
    } else {
        Monotonicity::NonMonotone
    };
    debug_assert_eq!(class.is_strict(), delta_product_condition(bv), "{bv}");
    class
}

pub fn classify_edge(bv: &BoundaryValues, edge: Edge) -> Monotonicity {
    classify_bottom(&edge.orient(bv))
}

/// The sufficient conditions in their original midpoint form:
/// `beta < f(p12) < gamma` and `1/4 <= (gamma - f(p12)) / (f(p12) - beta) <= 4`.
pub fn dsv_check(bv: &BoundaryValues, edge: Edge) -> bool {
    let bv = edge.orient(bv);
    let mid = extend_once(&bv).p12;
    if !(bv.beta < mid && mid < bv.gamma) {
        return false;
    }
    let ratio = (&bv.gamma - &mid) / (&mid - &bv.beta);
    Rational::frac(1, 4) <= ratio && ratio <= Rational::from(4)
}

/// Whether all three edge restrictions are strictly monotone, via the vertex
/// relations `2 alpha = beta + gamma`, `2 beta = alpha + gamma`,
/// `2 gamma = alpha + beta`.
pub fn simultaneous_monotone(bv: &BoundaryValues) -> Result<bool> {
    if bv.is_constant() {
        return Err(Error::ConstantFunction);
    }
    Ok(Vertex::ALL
        .iter()
        .any(|&v| crate::gasket::normal_derivative_at(bv, v).is_zero()))
}

/// Edges sorted by side length `|f(start) - f(end)|`, longest first. Ties keep
/// the order bottom, left, right.
pub fn edges_by_side_length(bv: &BoundaryValues) -> [(Edge, Rational); 3] {
    let mut edges = Edge::ALL.map(|e| (e, e.side_length(bv)));
    edges.sort_by(|x, y| y.1.cmp(&x.1));
    edges
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Max,
    Min,
}

impl fmt::Display for ExtremumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremumKind::Max => "max",
            ExtremumKind::Min => "min",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Extremum {
    /// The extremum lies in `[lo, hi]`, a dyadic interval of width `2^-depth`.
    Bracket {
        lo: Rational,
        hi: Rational,
        kind: ExtremumKind,
    },
    /// The extremum sits exactly at a junction point.
    AtJunction {
        position: Rational,
        kind: ExtremumKind,
    },
}

impl Extremum {
    pub fn kind(&self) -> ExtremumKind {
        match self {
            Extremum::Bracket { kind, .. } | Extremum::AtJunction { kind, .. } => *kind,
        }
    }
}

/// Brackets the unique extremum of a non-monotone edge restriction.
///
/// Each step splits the current cell into its `p1` and `p2` children along the
/// edge. Exactly one child is non-monotone, or both are strictly monotone in
/// opposite directions and the extremum is their shared vertex.
pub fn locate_extremum(bv: &BoundaryValues, edge: Edge, depth: u32) -> Result<Extremum> {
    if depth < 1 {
        return Err(Error::LevelTooSmall { min: 1, got: depth });
    }
    let mut cell = edge.orient(bv);
    if classify_bottom(&cell) != Monotonicity::NonMonotone {
        return Err(Error::MonotoneRestriction(edge));
    }
    let mut lo = Rational::zero();
    let mut width = Rational::one();
    let mut kind: Option<ExtremumKind> = None;

    for level in 0..depth {
        let half = &width * &Rational::frac(1, 2);
        let left = cell.child(Vertex::P1);
        let right = cell.child(Vertex::P2);
        let classes = (classify_bottom(&left), classify_bottom(&right));
        let (next_kind, descend) = match classes {
            (Monotonicity::Constant, _) | (_, Monotonicity::Constant) => {
                return Err(Error::ConstantCell(format!("child of level-{level} bracket")));
            }
            (Monotonicity::StrictlyIncreasing, Monotonicity::StrictlyDecreasing) => {
                (ExtremumKind::Max, None)
            }
            (Monotonicity::StrictlyDecreasing, Monotonicity::StrictlyIncreasing) => {
                (ExtremumKind::Min, None)
            }
            (Monotonicity::StrictlyIncreasing, Monotonicity::NonMonotone) => {
                (ExtremumKind::Max, Some(Vertex::P2))
            }
            (Monotonicity::StrictlyDecreasing, Monotonicity::NonMonotone) => {
                (ExtremumKind::Min, Some(Vertex::P2))
            }
            (Monotonicity::NonMonotone, Monotonicity::StrictlyDecreasing) => {
                (ExtremumKind::Max, Some(Vertex::P1))
            }
            (Monotonicity::NonMonotone, Monotonicity::StrictlyIncreasing) => {
                (ExtremumKind::Min, Some(Vertex::P1))
            }
            (l, r) => {
                return Err(Error::Inconsistent(format!(
                    "children classified {l} and {r} under a non-monotone cell"
                )));
            }
        };
        if kind.is_some_and(|k| k != next_kind) {
            return Err(Error::Inconsistent(
                "extremum kind changed between levels".to_string(),
            ));
        }
        kind = Some(next_kind);
        match descend {
            None => {
                return Ok(Extremum::AtJunction {
                    position: &lo + &half,
                    kind: next_kind,
                });
            }
            Some(Vertex::P1) => cell = left,
            Some(_) => {
                lo = &lo + &half;
                cell = right;
            }
        }
        width = half;
    }
    Ok(Extremum::Bracket {
        hi: &lo + &width,
        lo,
        kind: kind.expect("depth >= 1"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gasket::{eval_dyadic, EdgePoint};
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn bv(a: i64, b: i64, c: i64) -> BoundaryValues {
        BoundaryValues::from_ints(a, b, c)
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_edge(&bv(1, 0, 2), Edge::Bottom), Monotonicity::StrictlyIncreasing);
        assert_eq!(classify_edge(&bv(5, 0, 1), Edge::Bottom), Monotonicity::NonMonotone);
        assert_eq!(classify_edge(&bv(0, 0, 0), Edge::Bottom), Monotonicity::Constant);
        // Saturated inequality alpha = 2 gamma - beta.
        assert_eq!(classify_edge(&bv(2, 0, 1), Edge::Bottom), Monotonicity::StrictlyIncreasing);
        assert_eq!(classify_edge(&bv(1, 2, 0), Edge::Bottom), Monotonicity::StrictlyDecreasing);
        // beta = gamma with alpha different is never monotone.
        assert_eq!(classify_edge(&bv(3, 1, 1), Edge::Bottom), Monotonicity::NonMonotone);
    }

    #[test]
    fn classify_other_edges() {
        // (1, 0, 2): all three edges strictly monotone.
        let f = bv(1, 0, 2);
        assert_eq!(classify_edge(&f, Edge::Left), Monotonicity::StrictlyDecreasing);
        assert_eq!(classify_edge(&f, Edge::Right), Monotonicity::StrictlyIncreasing);
        // (0, 0, 1): left edge [p0, p1] has equal endpoint values.
        let g = bv(0, 0, 1);
        assert_eq!(classify_edge(&g, Edge::Left), Monotonicity::NonMonotone);
    }

    #[test]
    fn dsv_examples() {
        assert!(dsv_check(&bv(1, 0, 2), Edge::Bottom));
        assert!(!dsv_check(&bv(5, 0, 1), Edge::Bottom));
        assert!(!dsv_check(&bv(0, 0, 0), Edge::Bottom));
        assert!(dsv_check(&bv(2, 0, 1), Edge::Bottom));
    }

    #[test]
    fn simultaneous_examples() {
        assert_eq!(simultaneous_monotone(&bv(1, 0, 2)), Ok(true));
        assert_eq!(simultaneous_monotone(&bv(0, 0, 1)), Ok(false));
        assert_eq!(simultaneous_monotone(&bv(0, 1, 2)), Ok(true));
        assert_eq!(simultaneous_monotone(&bv(4, 4, 4)), Err(Error::ConstantFunction));
    }

    #[test]
    fn extremum_first_level() {
        let f = bv(5, 0, 1);
        let left = f.child(Vertex::P1);
        let right = f.child(Vertex::P2);
        assert_eq!(left, BoundaryValues::new(q("11/5"), q("0"), q("7/5")));
        assert_eq!(right, BoundaryValues::new(q("12/5"), q("7/5"), q("1")));
        assert_eq!(
            locate_extremum(&f, Edge::Bottom, 1).unwrap(),
            Extremum::Bracket { lo: q("1/2"), hi: q("1"), kind: ExtremumKind::Max }
        );
    }

    #[test]
    fn extremum_depth_four_against_sampling() {
        let f = bv(5, 0, 1);
        let Extremum::Bracket { lo, hi, kind } = locate_extremum(&f, Edge::Bottom, 4).unwrap() else {
            panic!("expected a bracket");
        };
        assert_eq!(&hi - &lo, q("1/16"));
        assert_eq!(kind, ExtremumKind::Max);
        let samples: Vec<(Rational, Rational)> = (0..=256)
            .map(|k| {
                let x = Rational::frac(k, 256);
                let v = eval_dyadic(&f, &EdgePoint::new(Edge::Bottom, x.clone())).unwrap();
                (x, v)
            })
            .collect();
        let before: Vec<_> = samples.iter().filter(|(x, _)| *x <= lo).collect();
        let after: Vec<_> = samples.iter().filter(|(x, _)| *x >= hi).collect();
        assert!(before.windows(2).all(|w| w[0].1 < w[1].1));
        assert!(after.windows(2).all(|w| w[0].1 > w[1].1));
    }

    #[test]
    fn extremum_rejects_monotone_restriction() {
        for depth in [1, 5] {
            assert_eq!(
                locate_extremum(&bv(1, 0, 2), Edge::Bottom, depth),
                Err(Error::MonotoneRestriction(Edge::Bottom))
            );
        }
        assert!(locate_extremum(&bv(0, 0, 0), Edge::Bottom, 3).is_err());
    }

    #[test]
    fn extremum_exactly_at_midpoint() {
        // Symmetric about the midpoint: beta = gamma, so the extremum is at 1/2.
        let f = bv(3, 1, 1);
        assert_eq!(
            locate_extremum(&f, Edge::Bottom, 6).unwrap(),
            Extremum::AtJunction { position: q("1/2"), kind: ExtremumKind::Max }
        );
        assert_eq!(locate_extremum(&bv(-3, 1, 1), Edge::Bottom, 2).unwrap().kind(), ExtremumKind::Min);
    }

    #[test]
    fn side_length_ordering() {
        let order = edges_by_side_length(&bv(5, 0, 1));
        assert_eq!(order.clone().map(|(e, _)| e), [Edge::Left, Edge::Right, Edge::Bottom]);
        assert_eq!(order[2].1, q("1"));
    }

    fn arb_bv() -> impl Strategy<Value = BoundaryValues> {
        let r = || (-60i64..=60, 1i64..=12).prop_map(|(n, d)| Rational::frac(n, d));
        (r(), r(), r()).prop_map(|(a, b, c)| BoundaryValues::new(a, b, c))
    }

    proptest! {
        #[test]
        fn dsv_equivalent_to_linear_inequalities(f in arb_bv()) {
            prop_assert_eq!(dsv_check(&f, Edge::Bottom), increasing_condition(&f));
        }

        #[test]
        fn simultaneous_matches_three_edge_classification(f in arb_bv()) {
            prop_assume!(!f.is_constant());
            let all_strict = Edge::ALL.iter().all(|&e| classify_edge(&f, e).is_strict());
            prop_assert_eq!(simultaneous_monotone(&f).unwrap(), all_strict);
        }

        #[test]
        fn two_longest_edges_are_monotone(f in arb_bv()) {
            prop_assume!(!f.is_constant());
            let order = edges_by_side_length(&f);
            // A non-monotone edge is strictly shorter than both others.
            for (i, (edge, len)) in order.iter().enumerate() {
                if classify_edge(&f, *edge) == Monotonicity::NonMonotone {
                    prop_assert_eq!(i, 2);
                    prop_assert!(*len < order[1].1);
                }
            }
        }

        #[test]
        fn reversing_the_edge_flips_direction(f in arb_bv()) {
            let mirrored = BoundaryValues::new(f.alpha.clone(), f.gamma.clone(), f.beta.clone());
            let expected = match classify_bottom(&f) {
                Monotonicity::StrictlyIncreasing => Monotonicity::StrictlyDecreasing,
                Monotonicity::StrictlyDecreasing => Monotonicity::StrictlyIncreasing,
                other => other,
            };
            prop_assert_eq!(classify_bottom(&mirrored), expected);
        }
    }
}
