//! Zero derivative at the third points of an edge.
//!
//! The point `1/3` of the bottom edge is approached from both sides by the
//! nested cells `(12)^m` ("right half of the left half", repeated), whose
//! bottom vertices sit at `1/3 - (1/3) 4^-m` and `1/3 + (2/3) 4^-m`. Their
//! boundary values obey a linear recursion that conserves
//! `c = 5 alpha + 15 beta + 7 gamma`, so `f(1/3) = c/27`. The deviation from
//! `c/27` decays along the eigenvalues `s = (7 + sqrt 13)/50` and
//! `h = (7 - sqrt 13)/50`, both below `1/4`, which beats the `4^-m` shrinking
//! of the distance to `1/3`: the difference quotients tend to zero.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::derivative::Side;
use crate::arith::{QuadExt, Rational};
use crate::error::{Error, Result};
use crate::gasket::{cell_values, BoundaryValues, CellAddress, Vertex};

/// Which third point of a (sub-)edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Third {
    OneThird,
    TwoThirds,
}

impl fmt::Display for Third {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Third::OneThird => "1/3",
            Third::TwoThirds => "2/3",
        })
    }
}

/// `c = 5 alpha + 15 beta + 7 gamma`.
pub fn conserved_quantity(bv: &BoundaryValues) -> Rational {
    &bv.alpha * 5 + &bv.beta * 15 + &bv.gamma * 7
}

/// `f(1/3) = c/27` on the bottom edge.
pub fn third_point_value(bv: &BoundaryValues) -> Rational {
    conserved_quantity(bv) * Rational::frac(1, 27)
}

/// `f(1/3)` or `f(2/3)` on the bottom edge; the latter by reflection.
pub fn third_point_value_at(bv: &BoundaryValues, which: Third) -> Rational {
    match which {
        Third::OneThird => third_point_value(bv),
        Third::TwoThirds => {
            let mirrored = BoundaryValues::new(bv.alpha.clone(), bv.gamma.clone(), bv.beta.clone());
            third_point_value(&mirrored)
        }
    }
}

/// Values at the vertices of the `m`-th approach cell `(12)^m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleSequence {
    pub m: u32,
    pub alpha_m: Rational,
    pub beta_m: Rational,
    pub gamma_m: Rational,
    pub p1_m: Rational,
    pub p2_m: Rational,
}

impl TriangleSequence {
    fn start(bv: &BoundaryValues) -> Self {
        TriangleSequence {
            m: 0,
            alpha_m: bv.alpha.clone(),
            beta_m: bv.beta.clone(),
            gamma_m: bv.gamma.clone(),
            p1_m: Rational::zero(),
            p2_m: Rational::one(),
        }
    }

    fn step(&self) -> Self {
        let (a, b, c) = (&self.alpha_m, &self.beta_m, &self.gamma_m);
        let quarter = Rational::frac(1, 4);
        let span = &self.p2_m - &self.p1_m;
        TriangleSequence {
            m: self.m + 1,
            alpha_m: (a * 6 + b * 13 + c * 6) * Rational::frac(1, 25),
            beta_m: (a * 4 + b * 16 + c * 5) * Rational::frac(1, 25),
            gamma_m: (a + &(b * 2) + c * 2) * Rational::frac(1, 5),
            p1_m: &self.p1_m + &(&span * &quarter),
            p2_m: &self.p1_m + &(&span * &Rational::frac(1, 2)),
        }
    }

    pub fn values(&self) -> BoundaryValues {
        BoundaryValues::new(self.alpha_m.clone(), self.beta_m.clone(), self.gamma_m.clone())
    }

    /// `5 alpha_m + 15 beta_m + 7 gamma_m`.
    pub fn conserved(&self) -> Rational {
        conserved_quantity(&self.values())
    }
}

/// Iterator over the approach cells `m = 0, 1, 2, ...`.
#[derive(Debug, Clone)]
pub struct ApproachCells {
    next: TriangleSequence,
}

impl Iterator for ApproachCells {
    type Item = TriangleSequence;

    fn next(&mut self) -> Option<TriangleSequence> {
        let following = self.next.step();
        Some(std::mem::replace(&mut self.next, following))
    }
}

pub fn approach_cells(bv: &BoundaryValues) -> ApproachCells {
    ApproachCells {
        next: TriangleSequence::start(bv),
    }
}

pub fn triangle_sequence(bv: &BoundaryValues, m: u32) -> TriangleSequence {
    approach_cells(bv)
        .nth(m as usize)
        .expect("approach iterator is infinite")
}

/// Address of the `m`-th approach cell, `(12)^m`.
pub fn approach_address(m: u32) -> CellAddress {
    (0..m).flat_map(|_| [Vertex::P1, Vertex::P2]).collect()
}

/// Constants of the explicit solution of the approach recursion.
///
/// With `t_m = u beta_m + v gamma_m` (`u = 10`, `v = 1 - sqrt 13`) the
/// recursion decouples into `t_m = w + s t_(m-1)` and
/// `gamma_m = l + k s^(m-1) + h gamma_(m-1)`, giving
///
/// ```text
/// gamma_m = gamma_h h^m + gamma_s s^m + c/27
/// beta_m  = beta_s  s^m + beta_h  h^m + c/27
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThirdPointContext {
    pub c: Rational,
    pub u: Rational,
    pub v: QuadExt,
    pub s: QuadExt,
    pub h: QuadExt,
    pub w: QuadExt,
    pub t0: QuadExt,
    pub l: QuadExt,
    pub k: QuadExt,
    /// Coefficient of `h^m` in `gamma_m`.
    pub gamma_h: QuadExt,
    /// Coefficient of `s^m` in `gamma_m`, `k / (s - h)`.
    pub gamma_s: QuadExt,
    /// Coefficient of `s^m` in `beta_m`.
    pub beta_s: QuadExt,
    /// Coefficient of `h^m` in `beta_m`.
    pub beta_h: QuadExt,
}

impl ThirdPointContext {
    pub fn new(bv: &BoundaryValues) -> Self {
        let q = |n, d| QuadExt::rational(Rational::frac(n, d));
        let c = conserved_quantity(bv);
        let u = Rational::from(10);
        let v = &QuadExt::one() - &QuadExt::sqrt13();
        let s = QuadExt::new(Rational::frac(7, 50), Rational::frac(1, 50));
        let h = (&v + &QuadExt::from(6)).scale(&Rational::frac(1, 50));
        let w = QuadExt::new(Rational::from(9), Rational::from(-1))
            .scale(&(&c * &Rational::frac(1, 25)));
        let t0 = &QuadExt::rational(&bv.beta * 10) + &v.scale(&bv.gamma);

        // s - 1, h - 1 and s - h are nonzero: s, h are irrational.
        let div = |x: &QuadExt, y: &QuadExt| x.checked_div(y).expect("nonzero divisor");
        let s_minus_1 = &s - &QuadExt::one();
        let h_minus_1 = &h - &QuadExt::one();
        let s_minus_h = &s - &h;
        let w_over = div(&w, &s_minus_1);

        let l = &QuadExt::rational(&c * &Rational::frac(1, 25)) + &(&w_over * &q(1, 50));
        let k = (&w_over + &t0).scale(&Rational::frac(-1, 50));
        let gamma_s = div(&k, &s_minus_h);
        let gamma_h = &(&div(&l, &h_minus_1) - &gamma_s) + &QuadExt::rational(bv.gamma.clone());
        let u_inv = Rational::frac(1, 10);
        let beta_s = (&(&w_over - &(&v * &gamma_s)) + &t0).scale(&u_inv);
        let beta_h = (&v * &gamma_h).scale(&(-&u_inv));

        ThirdPointContext {
            c,
            u,
            v,
            s,
            h,
            w,
            t0,
            l,
            k,
            gamma_h,
            gamma_s,
            beta_s,
            beta_h,
        }
    }

    fn third_value(&self) -> QuadExt {
        QuadExt::rational(&self.c * &Rational::frac(1, 27))
    }

    fn powers(&self, m: u32) -> (QuadExt, QuadExt) {
        let e = m as i32;
        (
            self.s.pow(e).expect("nonnegative exponent"),
            self.h.pow(e).expect("nonnegative exponent"),
        )
    }

    pub fn gamma_at(&self, m: u32) -> QuadExt {
        let (s_m, h_m) = self.powers(m);
        &(&(&self.gamma_h * &h_m) + &(&self.gamma_s * &s_m)) + &self.third_value()
    }

    pub fn beta_at(&self, m: u32) -> QuadExt {
        let (s_m, h_m) = self.powers(m);
        &(&(&self.beta_s * &s_m) + &(&self.beta_h * &h_m)) + &self.third_value()
    }

    /// Two-term expansion of the third-point difference quotient on `side`.
    pub fn quotient_expansion(&self, side: Side) -> QuotientExpansion {
        match side {
            // (gamma_m - c/27) / ((2/3) 4^-m)
            Side::Right => QuotientExpansion {
                scale: Rational::frac(3, 2),
                slow: self.gamma_s.clone(),
                fast: self.gamma_h.clone(),
                s: self.s.clone(),
                h: self.h.clone(),
            },
            // (beta_m - c/27) / (-(1/3) 4^-m)
            Side::Left => QuotientExpansion {
                scale: Rational::from(-3),
                slow: self.beta_s.clone(),
                fast: self.beta_h.clone(),
                s: self.s.clone(),
                h: self.h.clone(),
            },
        }
    }
}

/// `quotient(m) = scale * 4^m * (slow * s^m + fast * h^m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientExpansion {
    pub scale: Rational,
    pub slow: QuadExt,
    pub fast: QuadExt,
    s: QuadExt,
    h: QuadExt,
}

/// Dominance factor of the slow term at which consecutive quotient ratios are
/// guaranteed to stay at or below 9/10.
pub const DOMINANCE_FACTOR: i64 = 20;

impl QuotientExpansion {
    pub fn quotient_at(&self, m: u32) -> QuadExt {
        let e = m as i32;
        let four_m = Rational::from(4).pow(e).expect("nonzero base");
        let s_m = self.s.pow(e).expect("nonnegative exponent");
        let h_m = self.h.pow(e).expect("nonnegative exponent");
        (&(&self.slow * &s_m) + &(&self.fast * &h_m)).scale(&(&self.scale * &four_m))
    }

    /// First `m` with `|slow s^m| >= 20 |fast h^m|`.
    ///
    /// From there on `|quotient(m+1)| <= (9/10) |quotient(m)|`: writing
    /// `r = fast h^m / (slow s^m)`, the ratio is `4 (s + r h) / (1 + r)`, which
    /// stays below `4s < 9/10` for `r >= 0` and below `9/10` for
    /// `-1/20 <= r < 0`; `|r|` only shrinks afterwards since `h < s`. Before the
    /// onset the two terms can cancel and the ratio is unbounded. `Some(0)` when
    /// the slow term vanishes (ratio `4h` throughout), `None` when both do.
    pub fn decay_onset(&self) -> Option<u32> {
        if self.slow.is_zero() {
            return (!self.fast.is_zero()).then_some(0);
        }
        let slow = self.slow.abs();
        let fast = self.fast.abs().scale(&Rational::from(DOMINANCE_FACTOR));
        let mut m = 0;
        let mut slow_term = slow;
        let mut fast_term = fast;
        while slow_term < fast_term {
            slow_term = &slow_term * &self.s;
            fast_term = &fast_term * &self.h;
            m += 1;
        }
        Some(m)
    }
}

fn rational_or_residue(x: QuadExt) -> Result<Rational> {
    match x.to_rational() {
        Some(r) => Ok(r),
        None => Err(Error::IrrationalResidue(x.root13_part().clone())),
    }
}

/// `gamma_m` from the explicit solution, evaluated in Q(sqrt 13).
pub fn gamma_closed_form(bv: &BoundaryValues, m: u32) -> Result<Rational> {
    rational_or_residue(ThirdPointContext::new(bv).gamma_at(m))
}

/// `beta_m` from the explicit solution, evaluated in Q(sqrt 13).
pub fn beta_closed_form(bv: &BoundaryValues, m: u32) -> Result<Rational> {
    rational_or_residue(ThirdPointContext::new(bv).beta_at(m))
}

/// Exact difference quotient toward `1/3` from the `m`-th approach cell:
/// `(gamma_m - c/27) / (p2_m - 1/3)` on the right, `(beta_m - c/27) / (p1_m - 1/3)`
/// on the left.
pub fn third_point_quotient(bv: &BoundaryValues, m: u32, side: Side) -> Result<Rational> {
    if m < 1 {
        return Err(Error::LevelTooSmall { min: 1, got: m });
    }
    let cell = triangle_sequence(bv, m);
    Ok(quotient_from_cell(&cell, &third_point_value(bv), side))
}

pub(crate) fn quotient_from_cell(cell: &TriangleSequence, target: &Rational, side: Side) -> Rational {
    let third = Rational::frac(1, 3);
    let (value, position) = match side {
        Side::Right => (&cell.gamma_m, &cell.p2_m),
        Side::Left => (&cell.beta_m, &cell.p1_m),
    };
    (value - target) / (position - &third)
}

/// Quotients for `m = 1..=m_max` on one side, sharing one pass of the recursion.
pub fn third_point_quotients(bv: &BoundaryValues, m_max: u32, side: Side) -> Vec<Rational> {
    let target = third_point_value(bv);
    approach_cells(bv)
        .skip(1)
        .take(m_max as usize)
        .map(|cell| quotient_from_cell(&cell, &target, side))
        .collect()
}

/// Global position and exact value of a third point of the bottom sub-edge of
/// the cell `addr`, which must lie on the bottom edge (digits 1 and 2 only).
pub fn third_point_of_subedge(
    bv: &BoundaryValues,
    addr: &CellAddress,
    which: Third,
) -> Result<(Rational, Rational)> {
    let k = addr
        .bottom_index()
        .ok_or_else(|| Error::OffBottomEdge(addr.to_string()))?;
    let m = addr.depth() as u32;
    let offset = match which {
        Third::OneThird => 1,
        Third::TwoThirds => 2,
    };
    let denom = num_bigint::BigInt::from(3) << m;
    let position = Rational::new(k * 3 + offset, denom)?;
    let value = third_point_value_at(&cell_values(bv, addr), which);
    Ok((position, value))
}

/// Inverse of [`third_point_of_subedge`]'s position: the sub-edge cell and
/// which third for a position with reduced denominator `3 * 2^m`.
pub fn subedge_for_position(position: &Rational) -> Option<(CellAddress, Third)> {
    if position.is_negative() || *position > 1 {
        return None;
    }
    let three = num_bigint::BigInt::from(3);
    let denom = position.denom();
    if denom % &three != num_bigint::BigInt::from(0) {
        return None;
    }
    let (_, m) = Rational::new(1, denom / &three).ok()?.dyadic_parts()?;
    let numer = position.numer();
    let k = numer / &three;
    let which = if numer % &three == num_bigint::BigInt::from(1) {
        Third::OneThird
    } else {
        Third::TwoThirds
    };
    Some((CellAddress::bottom_cell(&k, m), which))
}
