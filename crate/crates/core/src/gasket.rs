//! Cell structure of the gasket and exact evaluation of harmonic functions.
//!
//! A harmonic function is fixed by its values `(alpha, beta, gamma)` at the
//! boundary vertices `p0` (apex), `p1` and `p2`. Values at midpoints follow
//! from the 1/5-2/5 extension rule, applied identically in every cell, so the
//! value at any vertex of `G_m` is reached by descending a cell address.
//!
//! Edge algorithms are written once for the bottom edge `[p1, p2]`, which is
//! parametrized by `[0, 1]` with `0 -> p1`. The other two edges are handled by
//! relabelling the boundary triple, see [`Edge::orient`].

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};

/// Values of a harmonic function at `p0`, `p1`, `p2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryValues {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

impl BoundaryValues {
    pub fn new(alpha: Rational, beta: Rational, gamma: Rational) -> Self {
        BoundaryValues { alpha, beta, gamma }
    }

    pub fn from_ints(alpha: i64, beta: i64, gamma: i64) -> Self {
        BoundaryValues::new(alpha.into(), beta.into(), gamma.into())
    }

    pub fn is_constant(&self) -> bool {
        self.alpha == self.beta && self.beta == self.gamma
    }

    /// `alpha + beta + gamma`.
    pub fn delta(&self) -> Rational {
        &self.alpha + &self.beta + &self.gamma
    }

    pub fn at(&self, vertex: Vertex) -> &Rational {
        match vertex {
            Vertex::P0 => &self.alpha,
            Vertex::P1 => &self.beta,
            Vertex::P2 => &self.gamma,
        }
    }

    pub fn min(&self) -> &Rational {
        (&self.alpha).min(&self.beta).min(&self.gamma)
    }

    pub fn max(&self) -> &Rational {
        (&self.alpha).max(&self.beta).max(&self.gamma)
    }

    /// Boundary triple of the child cell at `vertex`.
    ///
    /// Child vertices are the images of the parent's `(p0, p1, p2)` under the
    /// contraction toward `vertex`: the child at `p1` is `(p01, p1, p12)`.
    pub fn child(&self, vertex: Vertex) -> BoundaryValues {
        let mid = extend_once(self);
        match vertex {
            Vertex::P0 => BoundaryValues::new(self.alpha.clone(), mid.p01, mid.p02),
            Vertex::P1 => BoundaryValues::new(mid.p01, self.beta.clone(), mid.p12),
            Vertex::P2 => BoundaryValues::new(mid.p02, mid.p12, self.gamma.clone()),
        }
    }
}

impl fmt::Display for BoundaryValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.alpha, self.beta, self.gamma)
    }
}

impl Add<&BoundaryValues> for &BoundaryValues {
    type Output = BoundaryValues;
    fn add(self, rhs: &BoundaryValues) -> BoundaryValues {
        BoundaryValues::new(
            &self.alpha + &rhs.alpha,
            &self.beta + &rhs.beta,
            &self.gamma + &rhs.gamma,
        )
    }
}

impl Mul<&BoundaryValues> for &Rational {
    type Output = BoundaryValues;
    fn mul(self, rhs: &BoundaryValues) -> BoundaryValues {
        BoundaryValues::new(self * &rhs.alpha, self * &rhs.beta, self * &rhs.gamma)
    }
}

/// A boundary vertex of a cell; also the digit alphabet of [`CellAddress`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Vertex {
    P0,
    P1,
    P2,
}

impl Vertex {
    pub const ALL: [Vertex; 3] = [Vertex::P0, Vertex::P1, Vertex::P2];

    pub fn index(self) -> u8 {
        match self {
            Vertex::P0 => 0,
            Vertex::P1 => 1,
            Vertex::P2 => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Vertex> {
        match i {
            0 => Some(Vertex::P0),
            1 => Some(Vertex::P1),
            2 => Some(Vertex::P2),
            _ => None,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.index())
    }
}

/// A word over `{0, 1, 2}` naming a cell; the empty word is `G_0` and `w.i`
/// is the sub-cell of `w` at its vertex `p_i`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellAddress(Vec<Vertex>);

impl CellAddress {
    pub fn root() -> Self {
        CellAddress(Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn digits(&self) -> &[Vertex] {
        &self.0
    }

    pub fn child(&self, vertex: Vertex) -> CellAddress {
        let mut word = self.0.clone();
        word.push(vertex);
        CellAddress(word)
    }

    pub fn concat(&self, other: &CellAddress) -> CellAddress {
        let mut word = self.0.clone();
        word.extend_from_slice(&other.0);
        CellAddress(word)
    }

    /// The depth-`m` cell on the bottom edge covering `[k/2^m, (k+1)/2^m]`:
    /// binary digits of `k`, most significant first, with `0 -> p1`, `1 -> p2`.
    pub fn bottom_cell(k: &BigInt, m: u32) -> CellAddress {
        CellAddress(
            (0..m)
                .rev()
                .map(|bit| {
                    if k.bit(bit as u64) {
                        Vertex::P2
                    } else {
                        Vertex::P1
                    }
                })
                .collect(),
        )
    }

    /// Inverse of [`CellAddress::bottom_cell`]; `None` if the word contains a 0.
    pub fn bottom_index(&self) -> Option<BigInt> {
        self.0.iter().try_fold(BigInt::zero(), |acc, v| match v {
            Vertex::P0 => None,
            Vertex::P1 => Some(acc << 1),
            Vertex::P2 => Some((acc << 1) + 1),
        })
    }
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("\u{2205}");
        }
        for v in &self.0 {
            write!(f, "{}", v.index())?;
        }
        Ok(())
    }
}

impl FromStr for CellAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "\u{2205}" || s == "-" {
            return Ok(CellAddress::root());
        }
        s.bytes()
            .map(|b| {
                b.checked_sub(b'0')
                    .and_then(Vertex::from_index)
                    .ok_or_else(|| Error::ParseAddress(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(CellAddress)
    }
}

impl FromIterator<Vertex> for CellAddress {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        CellAddress(iter.into_iter().collect())
    }
}

/// One of the three edges of `G_0`, named by its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    /// `[p1, p2]`
    Bottom,
    /// `[p0, p1]`
    Left,
    /// `[p0, p2]`
    Right,
}

impl Edge {
    pub const ALL: [Edge; 3] = [Edge::Bottom, Edge::Left, Edge::Right];

    /// `(start, end)`: position 0 is `start`, position 1 is `end`.
    pub fn endpoints(self) -> (Vertex, Vertex) {
        match self {
            Edge::Bottom => (Vertex::P1, Vertex::P2),
            Edge::Left => (Vertex::P0, Vertex::P1),
            Edge::Right => (Vertex::P0, Vertex::P2),
        }
    }

    /// The vertex not on this edge.
    pub fn opposite(self) -> Vertex {
        match self {
            Edge::Bottom => Vertex::P0,
            Edge::Left => Vertex::P2,
            Edge::Right => Vertex::P1,
        }
    }

    /// Relabels `bv` so that this edge becomes the bottom edge, start at `p1`.
    ///
    /// Left `[p0, p1]` maps to `(gamma, alpha, beta)`, right `[p0, p2]` to
    /// `(beta, alpha, gamma)`.
    pub fn orient(self, bv: &BoundaryValues) -> BoundaryValues {
        let (start, end) = self.endpoints();
        BoundaryValues::new(
            bv.at(self.opposite()).clone(),
            bv.at(start).clone(),
            bv.at(end).clone(),
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Edge::Bottom => "bottom",
            Edge::Left => "left",
            Edge::Right => "right",
        }
    }

    /// `|f(start) - f(end)|`, the edge's side length with respect to `f`.
    pub fn side_length(self, bv: &BoundaryValues) -> Rational {
        let (start, end) = self.endpoints();
        (bv.at(start) - bv.at(end)).abs()
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Edge {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bottom" | "p1p2" | "12" => Ok(Edge::Bottom),
            "left" | "p0p1" | "01" => Ok(Edge::Left),
            "right" | "p0p2" | "02" => Ok(Edge::Right),
            other => Err(format!("unknown edge {other:?} (expected bottom, left or right)")),
        }
    }
}

/// A point on an edge of `G_0` at a rational position in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgePoint {
    pub edge: Edge,
    pub position: Rational,
}

impl EdgePoint {
    pub fn new(edge: Edge, position: Rational) -> Self {
        EdgePoint { edge, position }
    }

    /// `(k, m)` with `position = k / 2^m` in lowest terms.
    pub fn dyadic(&self) -> Result<(BigInt, u32)> {
        dyadic_in_unit_interval(&self.position)
    }
}

pub(crate) fn dyadic_in_unit_interval(position: &Rational) -> Result<(BigInt, u32)> {
    if position.is_negative() || *position > 1 {
        return Err(Error::NonDyadic(position.clone()));
    }
    position
        .dyadic_parts()
        .ok_or_else(|| Error::NonDyadic(position.clone()))
}

/// Harmonic-extension values at the three edge midpoints of a cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Midpoints {
    pub p12: Rational,
    pub p02: Rational,
    pub p01: Rational,
}

/// The extension rule: each midpoint gets 2/5 from the two endpoints of its
/// edge and 1/5 from the opposite vertex.
pub fn extend_once(bv: &BoundaryValues) -> Midpoints {
    let fifth = Rational::frac(1, 5);
    let (a, b, c) = (&bv.alpha, &bv.beta, &bv.gamma);
    Midpoints {
        p12: (a + &(b * 2) + (c * 2)) * &fifth,
        p02: (a * 2 + b + (c * 2)) * &fifth,
        p01: (a * 2 + (b * 2) + c) * &fifth,
    }
}

/// Boundary triple of the cell at `addr`.
pub fn cell_values(bv: &BoundaryValues, addr: &CellAddress) -> BoundaryValues {
    addr.digits()
        .iter()
        .fold(bv.clone(), |cell, &vertex| cell.child(vertex))
}

/// Exact value at a dyadic point `k/2^m` of an edge.
pub fn eval_dyadic(bv: &BoundaryValues, pt: &EdgePoint) -> Result<Rational> {
    let (k, m) = pt.dyadic()?;
    let oriented = pt.edge.orient(bv);
    Ok(eval_bottom(&oriented, &k, m))
}

/// Value at `k/2^m` on the bottom edge, `0 <= k <= 2^m`.
pub(crate) fn eval_bottom(bv: &BoundaryValues, k: &BigInt, m: u32) -> Rational {
    if *k == BigInt::one() << m {
        return bv.gamma.clone();
    }
    cell_values(bv, &CellAddress::bottom_cell(k, m)).beta
}

/// Values at `k / 2^depth`, `k = 0..=2^depth`, along an edge, in order of `k`.
/// Depth-first over the edge cells, so memory stays proportional to `depth`.
pub struct EdgeSamples {
    depth: u32,
    stack: Vec<(BoundaryValues, u32)>,
    last: Option<Rational>,
    next_k: BigInt,
}

impl Iterator for EdgeSamples {
    /// `(k, f(k / 2^depth))`
    type Item = (BigInt, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        while let Some((cell, level)) = self.stack.pop() {
            if level == self.depth {
                let k = self.next_k.clone();
                self.next_k += 1;
                self.last = Some(cell.gamma.clone());
                return Some((k, cell.beta));
            }
            self.stack.push((cell.child(Vertex::P2), level + 1));
            self.stack.push((cell.child(Vertex::P1), level + 1));
        }
        let end = self.last.take()?;
        Some((self.next_k.clone(), end))
    }
}

pub fn edge_samples(bv: &BoundaryValues, edge: Edge, depth: u32) -> EdgeSamples {
    EdgeSamples {
        depth,
        stack: vec![(edge.orient(bv), 0)],
        last: None,
        next_k: BigInt::from(0),
    }
}

/// The four bottom-edge points with closed-form values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormPoint {
    /// `1 / 2^m`
    HalfPower,
    /// `1 - 1 / 2^m`
    OneMinusHalfPower,
    /// `l_m = 1/2 - 1 / 2^(m+1)`
    LeftOfMiddle,
    /// `r_m = 1/2 + 1 / 2^(m+1)`
    RightOfMiddle,
}

impl ClosedFormPoint {
    pub const ALL: [ClosedFormPoint; 4] = [
        ClosedFormPoint::HalfPower,
        ClosedFormPoint::OneMinusHalfPower,
        ClosedFormPoint::LeftOfMiddle,
        ClosedFormPoint::RightOfMiddle,
    ];

    pub fn position(self, m: u32) -> Rational {
        let half_pow = Rational::frac(1, 2).pow(m as i32).expect("nonzero base");
        let half = Rational::frac(1, 2);
        match self {
            ClosedFormPoint::HalfPower => half_pow,
            ClosedFormPoint::OneMinusHalfPower => Rational::one() - half_pow,
            ClosedFormPoint::LeftOfMiddle => half - half_pow * &Rational::frac(1, 2),
            ClosedFormPoint::RightOfMiddle => half + half_pow * &Rational::frac(1, 2),
        }
    }
}

/// Coefficients `[c_alpha, c_beta, c_gamma]` of the value at `which(m)`.
///
/// The right-of-middle row is the left-of-middle row with the beta and gamma
/// coefficients exchanged (reflection of the bottom edge).
pub fn closed_form_coefficients(m: u32, which: ClosedFormPoint) -> Result<[Rational; 3]> {
    if m < 1 {
        return Err(Error::LevelTooSmall { min: 1, got: m });
    }
    let e = m as i32;
    let pow3 = Rational::from(3).pow(e)?;
    let pow5 = Rational::from(5).pow(e)?;
    let one = Rational::one();
    let two_pow5 = &pow5 * 2;
    let ten_pow5 = &pow5 * 10;

    let near_alpha = (&pow3 - &one) / &two_pow5;
    let near_start = &one - (&pow3 / &pow5);
    let near_end = (&pow3 + &one) / &two_pow5;

    let mid_alpha = (&pow5 - &one) / (&pow5 * 5);
    let mid_near = (&pow3 * 3 + &pow5 * 4 + Rational::from(3)) / &ten_pow5;
    let mid_far = (&pow5 * 4 - &pow3 * 3 - one) / &ten_pow5;

    Ok(match which {
        ClosedFormPoint::HalfPower => [near_alpha, near_start, near_end],
        ClosedFormPoint::OneMinusHalfPower => [near_alpha, near_end, near_start],
        ClosedFormPoint::LeftOfMiddle => [mid_alpha, mid_near, mid_far],
        ClosedFormPoint::RightOfMiddle => [mid_alpha, mid_far, mid_near],
    })
}

/// Value at `which(m)` on the bottom edge from the closed-form coefficients.
pub fn closed_form_lemma2(bv: &BoundaryValues, m: u32, which: ClosedFormPoint) -> Result<Rational> {
    let [ca, cb, cc] = closed_form_coefficients(m, which)?;
    Ok(ca * &bv.alpha + cb * &bv.beta + cc * &bv.gamma)
}

/// Normal derivative at the apex `p0`: `2 alpha - beta - gamma`.
pub fn normal_derivative(bv: &BoundaryValues) -> Rational {
    &bv.alpha * 2 - &bv.beta - &bv.gamma
}

/// Normal derivative at any boundary vertex.
pub fn normal_derivative_at(bv: &BoundaryValues, vertex: Vertex) -> Rational {
    let others: Vec<&Rational> = Vertex::ALL
        .iter()
        .filter(|&&v| v != vertex)
        .map(|&v| bv.at(v))
        .collect();
    bv.at(vertex) * 2 - others[0] - others[1]
}

/// `(5/3)^m (2 f(p0) - f(x_m) - f(y_m))` with `x_m`, `y_m` the two
/// depth-`m` neighbours of the apex. Constant in `m`.
pub fn renormalized_apex_difference(bv: &BoundaryValues, m: u32) -> Rational {
    let corner: CellAddress = std::iter::repeat_n(Vertex::P0, m as usize).collect();
    let cell = cell_values(bv, &corner);
    let scale = Rational::frac(5, 3).pow(m as i32).expect("nonzero base");
    scale * (&cell.alpha * 2 - &cell.beta - &cell.gamma)
}
