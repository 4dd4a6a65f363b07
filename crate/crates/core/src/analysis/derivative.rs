//! One-sided derivatives of edge restrictions at junction points.
//!
//! Let `(a, b, c)` be the cell whose bottom-left vertex is the junction `x` and
//! `len` its bottom side. Applying the extension rule `j` times toward `b`,
//!
//! ```text
//! f(x + len / 2^j) - f(x) = (3/5)^j (a + c - 2b) / 2 + (c - a) / (2 * 5^j)
//! ```
//!
//! so the difference quotient along the geometric sequence `x + len / 2^j`
//! grows like `(6/5)^j` with the sign of `a + c - 2b`, or decays like
//! `(2/5)^j` when `a + c = 2b`. Strict monotonicity near `x` then pins down
//! the one-sided derivative from this sequence alone. The left side is the
//! mirror image on the cell whose bottom-right vertex is `x`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::gasket::{
    cell_values, dyadic_in_unit_interval, eval_bottom, BoundaryValues, CellAddress, Edge,
    EdgePoint, Vertex,
};

/// Deepest junction scan accepted by [`count_zero_junctions`].
pub const MAX_SCAN_DEPTH: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DerivClass {
    PlusInfinity,
    MinusInfinity,
    Zero,
}

impl DerivClass {
    fn from_sign(sign: i32) -> DerivClass {
        match sign {
            1 => DerivClass::PlusInfinity,
            -1 => DerivClass::MinusInfinity,
            _ => DerivClass::Zero,
        }
    }
}

impl fmt::Display for DerivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DerivClass::PlusInfinity => "+inf",
            DerivClass::MinusInfinity => "-inf",
            DerivClass::Zero => "0",
        })
    }
}

/// Left and right derivative classes; `None` where the side leaves the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneSided {
    pub left: Option<DerivClass>,
    pub right: Option<DerivClass>,
}

impl OneSided {
    pub fn has_zero(&self) -> bool {
        self.left == Some(DerivClass::Zero) || self.right == Some(DerivClass::Zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

fn require_nonconstant(cell: &BoundaryValues, label: impl FnOnce() -> String) -> Result<()> {
    if cell.is_constant() {
        Err(Error::ConstantCell(label()))
    } else {
        Ok(())
    }
}

/// Class of the right derivative at the bottom-left vertex of `cell`.
pub fn right_class(cell: &BoundaryValues) -> DerivClass {
    let excess = &cell.alpha + &cell.gamma - &cell.beta * 2;
    DerivClass::from_sign(excess.signum())
}

/// Class of the left derivative at the bottom-right vertex of `cell`.
pub fn left_class(cell: &BoundaryValues) -> DerivClass {
    let excess = &cell.gamma * 2 - &cell.alpha - &cell.beta;
    DerivClass::from_sign(excess.signum())
}

type AddressedCell = (CellAddress, BoundaryValues);

/// Bottom-edge cells adjacent to the junction `k/2^m`: the one ending there
/// and the one starting there.
fn adjacent_cells(bv: &BoundaryValues, k: &BigInt, m: u32) -> (Option<AddressedCell>, Option<AddressedCell>) {
    let end = BigInt::one() << m;
    let left = (!k.is_zero()).then(|| {
        let addr = CellAddress::bottom_cell(&(k - 1), m);
        let cell = cell_values(bv, &addr);
        (addr, cell)
    });
    let right = (*k != end).then(|| {
        let addr = CellAddress::bottom_cell(k, m);
        let cell = cell_values(bv, &addr);
        (addr, cell)
    });
    (left, right)
}

/// One-sided derivative classes of the restriction to `edge` at a dyadic
/// position.
pub fn junction_derivative(bv: &BoundaryValues, edge: Edge, position: &Rational) -> Result<OneSided> {
    let (k, m) = dyadic_in_unit_interval(position)?;
    let oriented = edge.orient(bv);
    let (left, right) = adjacent_cells(&oriented, &k, m);
    let left = left
        .map(|(addr, cell)| {
            require_nonconstant(&cell, || addr.to_string())?;
            Ok(left_class(&cell))
        })
        .transpose()?;
    let right = right
        .map(|(addr, cell)| {
            require_nonconstant(&cell, || addr.to_string())?;
            Ok(right_class(&cell))
        })
        .transpose()?;
    Ok(OneSided { left, right })
}

/// Exact difference quotient `(f(x_j) - f(x)) / (x_j - x)` along the geometric
/// approach `x_j = x -/+ 2^-(m + j)` to the junction `x = k/2^m`.
pub fn difference_quotient(
    bv: &BoundaryValues,
    edge: Edge,
    position: &Rational,
    side: Side,
    j: u32,
) -> Result<Rational> {
    let (k, m) = dyadic_in_unit_interval(position)?;
    let oriented = edge.orient(bv);
    let level = m + j;
    let k_fine = &k << j;
    let k_near = match side {
        Side::Left if k.is_zero() => return Err(Error::NonDyadic(position.clone())),
        Side::Right if k == BigInt::one() << m => return Err(Error::NonDyadic(position.clone())),
        Side::Left => &k_fine - 1,
        Side::Right => &k_fine + 1,
    };
    let step = Rational::new(&k_near - &k_fine, BigInt::one() << level)?;
    let rise = eval_bottom(&oriented, &k_near, level) - eval_bottom(&oriented, &k_fine, level);
    rise.checked_div(&step)
}

/// A junction point of the contour of `G_0`, with shared vertices identified.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ContourPoint {
    Vertex { vertex: Vertex },
    Edge { edge: Edge, position: Rational },
}

impl ContourPoint {
    pub fn on_edge(edge: Edge, position: Rational) -> ContourPoint {
        let (start, end) = edge.endpoints();
        if position.is_zero() {
            ContourPoint::Vertex { vertex: start }
        } else if position == 1 {
            ContourPoint::Vertex { vertex: end }
        } else {
            ContourPoint::Edge { edge, position }
        }
    }

    pub fn as_edge_point(&self) -> EdgePoint {
        match self {
            ContourPoint::Vertex { vertex } => {
                let edge = Edge::ALL
                    .into_iter()
                    .find(|e| e.endpoints().0 == *vertex)
                    .unwrap_or(Edge::Bottom);
                let position = if edge.endpoints().0 == *vertex {
                    Rational::zero()
                } else {
                    Rational::one()
                };
                EdgePoint::new(edge, position)
            }
            ContourPoint::Edge { edge, position } => EdgePoint::new(*edge, position.clone()),
        }
    }
}

impl fmt::Display for ContourPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContourPoint::Vertex { vertex } => write!(f, "{vertex}"),
            ContourPoint::Edge { edge, position } => write!(f, "{edge}@{position}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroScan {
    pub depth: u32,
    pub count: usize,
    pub points: Vec<ContourPoint>,
}

/// Zero-class junctions on one edge at resolution `2^-depth`, as bottom-edge
/// positions. Walks the `2^depth` cells once.
fn zero_positions_on_edge(oriented: &BoundaryValues, depth: u32) -> Result<BTreeSet<Rational>> {
    let mut cells = vec![oriented.clone()];
    for _ in 0..depth {
        cells = cells
            .iter()
            .flat_map(|c| [c.child(Vertex::P1), c.child(Vertex::P2)])
            .collect();
    }
    let n = cells.len() as i64;
    let mut zeros = BTreeSet::new();
    for (k, cell) in cells.iter().enumerate() {
        let k = k as i64;
        require_nonconstant(cell, || format!("bottom cell {k}/{n}"))?;
        if right_class(cell) == DerivClass::Zero {
            zeros.insert(Rational::frac(k, n));
        }
        if left_class(cell) == DerivClass::Zero {
            zeros.insert(Rational::frac(k + 1, n));
        }
    }
    Ok(zeros)
}

/// Junction points of the contour of `G_0` (all `k/2^m`, `m <= depth`, on all
/// three edges) where some one-sided derivative class is `Zero`.
pub fn count_zero_junctions(bv: &BoundaryValues, depth: u32) -> Result<ZeroScan> {
    if bv.is_constant() {
        return Err(Error::ConstantFunction);
    }
    if depth > MAX_SCAN_DEPTH {
        return Err(Error::LevelTooLarge { max: MAX_SCAN_DEPTH, got: depth });
    }
    let mut points = BTreeSet::new();
    for edge in Edge::ALL {
        for position in zero_positions_on_edge(&edge.orient(bv), depth)? {
            points.insert(ContourPoint::on_edge(edge, position));
        }
    }
    let points: Vec<ContourPoint> = points.into_iter().collect();
    Ok(ZeroScan {
        depth,
        count: points.len(),
        points,
    })
}

/// Primitive integer relations `n alpha + m beta + k gamma = 0` with
/// `n + m + k = 0` and all coefficients bounded by `bound` in absolute value.
/// Normalized so the first nonzero coefficient is positive.
pub fn integer_relations(bv: &BoundaryValues, bound: i64) -> Vec<[i64; 3]> {
    let mut found = Vec::new();
    for n in -bound..=bound {
        for m in -bound..=bound {
            let k = -n - m;
            if k.abs() > bound || (n == 0 && m == 0) {
                continue;
            }
            let first = if n != 0 { n } else { m };
            if first < 0 || n.gcd(&m).gcd(&k) != 1 {
                continue;
            }
            let value = &bv.alpha * n + &bv.beta * m + &bv.gamma * k;
            if value.is_zero() {
                found.push([n, m, k]);
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::monotone::{classify_edge, Monotonicity};
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn bv(a: i64, b: i64, c: i64) -> BoundaryValues {
        BoundaryValues::from_ints(a, b, c)
    }

    #[test]
    fn middle_of_increasing_restriction() {
        let r = junction_derivative(&bv(0, 0, 1), Edge::Bottom, &q("1/2")).unwrap();
        assert_eq!(r, OneSided { left: Some(DerivClass::PlusInfinity), right: Some(DerivClass::PlusInfinity) });
    }

    #[test]
    fn endpoint_classes() {
        let r = junction_derivative(&bv(-2, 0, 2), Edge::Bottom, &q("0")).unwrap();
        assert_eq!(r, OneSided { left: None, right: Some(DerivClass::Zero) });
        let r = junction_derivative(&bv(1, 0, 2), Edge::Bottom, &q("0")).unwrap();
        assert_eq!(r, OneSided { left: None, right: Some(DerivClass::PlusInfinity) });
        let r = junction_derivative(&bv(1, 0, 2), Edge::Bottom, &q("1")).unwrap();
        assert_eq!(r, OneSided { left: Some(DerivClass::PlusInfinity), right: None });
        // 2 gamma = alpha + beta gives a zero left derivative at p2.
        let r = junction_derivative(&bv(4, 0, 2), Edge::Bottom, &q("1")).unwrap();
        assert_eq!(r.left, Some(DerivClass::Zero));
    }

    #[test]
    fn junction_errors() {
        assert!(matches!(
            junction_derivative(&bv(0, 0, 1), Edge::Bottom, &q("1/3")),
            Err(Error::NonDyadic(_))
        ));
        assert!(matches!(
            junction_derivative(&bv(2, 2, 2), Edge::Left, &q("1/4")),
            Err(Error::ConstantCell(_))
        ));
    }

    #[test]
    fn quotients_grow_or_vanish_as_classified() {
        // Right of p1 for (1, 0, 2): a + c - 2b = 3 > 0.
        let f = bv(1, 0, 2);
        let q10 = difference_quotient(&f, Edge::Bottom, &q("0"), Side::Right, 10).unwrap();
        let q20 = difference_quotient(&f, Edge::Bottom, &q("0"), Side::Right, 20).unwrap();
        assert!(q20 > q10 && q10 > Rational::from(1));
        // (-2, 0, 2) right of p1 is a zero class: quotients are (2/5)^j * 2.
        let g = bv(-2, 0, 2);
        for j in 1..12 {
            let expected = Rational::frac(2, 5).pow(j as i32).unwrap() * Rational::from(2);
            assert_eq!(difference_quotient(&g, Edge::Bottom, &q("0"), Side::Right, j).unwrap(), expected);
        }
        assert!(difference_quotient(&g, Edge::Bottom, &q("0"), Side::Left, 3).is_err());
    }

    #[test]
    fn zero_scan_examples() {
        let scan = count_zero_junctions(&bv(-2, 0, 2), 4).unwrap();
        assert_eq!(scan.count, 1);
        assert_eq!(scan.points, vec![ContourPoint::Vertex { vertex: Vertex::P1 }]);
        // f(p0) = f(p1) = 0 makes the left edge symmetric about its midpoint,
        // where the restriction has its extremum and a zero derivative.
        let scan = count_zero_junctions(&bv(0, 0, 1), 4).unwrap();
        assert_eq!(
            scan.points,
            vec![ContourPoint::Edge { edge: Edge::Left, position: q("1/2") }]
        );
        for j in 1..10 {
            let quot = difference_quotient(&bv(0, 0, 1), Edge::Left, &q("1/2"), Side::Right, j).unwrap();
            assert_eq!(quot, -Rational::frac(2, 5).pow(j as i32 + 1).unwrap());
        }
        let scan = count_zero_junctions(&bv(1, 0, 2), 4).unwrap();
        assert_eq!(scan.points, vec![ContourPoint::Vertex { vertex: Vertex::P0 }]);
        assert_eq!(count_zero_junctions(&bv(1, 1, 1), 4), Err(Error::ConstantFunction));
        assert!(count_zero_junctions(&bv(0, 0, 1), MAX_SCAN_DEPTH + 1).is_err());
    }

    #[test]
    fn interior_zero_junction() {
        // Right cell at 1/2 is (p02, p12, gamma); p02 + gamma = 2 p12 reduces to
        // beta = gamma, where 1/2 is the extremum of the restriction.
        let f = bv(4, 1, 1);
        let r = junction_derivative(&f, Edge::Bottom, &q("1/2")).unwrap();
        assert_eq!(r.right, Some(DerivClass::Zero));
        assert_eq!(r.left, Some(DerivClass::Zero));
        let scan = count_zero_junctions(&f, 6).unwrap();
        assert_eq!(
            scan.points,
            vec![ContourPoint::Edge { edge: Edge::Bottom, position: q("1/2") }]
        );
    }

    #[test]
    fn relations() {
        assert_eq!(integer_relations(&bv(-2, 0, 2), 5), vec![[1, -2, 1]]);
        assert!(integer_relations(&bv(0, 0, 1), 5).iter().all(|r| r[2] == 0));
        assert_eq!(integer_relations(&bv(0, 0, 1), 5), vec![[1, -1, 0]]);
        let irrational_like = BoundaryValues::new(q("0"), q("1"), q("1000"));
        assert!(integer_relations(&irrational_like, 10).is_empty());
    }

    #[test]
    fn contour_point_normalization() {
        assert_eq!(ContourPoint::on_edge(Edge::Left, q("1")), ContourPoint::Vertex { vertex: Vertex::P1 });
        assert_eq!(ContourPoint::on_edge(Edge::Right, q("0")), ContourPoint::Vertex { vertex: Vertex::P0 });
        let p = ContourPoint::Vertex { vertex: Vertex::P2 };
        assert_eq!(ContourPoint::on_edge(Edge::Bottom, q("1")), p);
        let ep = p.as_edge_point();
        assert_eq!(ContourPoint::on_edge(ep.edge, ep.position), p);
    }

    fn arb_bv() -> impl Strategy<Value = BoundaryValues> {
        let r = || (-50i64..=50, 1i64..=10).prop_map(|(n, d)| Rational::frac(n, d));
        (r(), r(), r()).prop_map(|(a, b, c)| BoundaryValues::new(a, b, c))
    }

    proptest! {
        #[test]
        fn at_most_one_zero_junction(f in arb_bv()) {
            prop_assume!(!f.is_constant());
            prop_assert!(count_zero_junctions(&f, 6).unwrap().count <= 1);
        }

        #[test]
        fn middle_classes_follow_direction(f in arb_bv()) {
            let class = classify_edge(&f, Edge::Bottom);
            prop_assume!(class.is_strict());
            let expected = if class == Monotonicity::StrictlyIncreasing {
                DerivClass::PlusInfinity
            } else {
                DerivClass::MinusInfinity
            };
            let r = junction_derivative(&f, Edge::Bottom, &q("1/2")).unwrap();
            prop_assert_eq!(r.left, Some(expected));
            prop_assert_eq!(r.right, Some(expected));
        }

        #[test]
        fn interior_zero_classes_come_in_pairs(f in arb_bv(), k in 1i64..64) {
            prop_assume!(!f.is_constant() && k % 2 == 1);
            let r = junction_derivative(&f, Edge::Bottom, &Rational::frac(k, 64)).unwrap();
            prop_assert_eq!(r.left == Some(DerivClass::Zero), r.right == Some(DerivClass::Zero));
        }
    }
}
