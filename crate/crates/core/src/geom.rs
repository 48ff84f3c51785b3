//! Exact rational plane geometry for developing curves through the
//! unit-square tiling of the plane.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

use crate::error::{ensure_internal, internal_err, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanePt {
    pub x: Rat,
    pub y: Rat,
}

impl PlanePt {
    pub fn new(x: Rat, y: Rat) -> Self {
        PlanePt { x, y }
    }
}

/// One maximal sub-segment of a straight segment inside a single unit square
/// of the integer tiling. Endpoints may lie on the square boundary.
#[derive(Debug, Clone)]
pub struct Piece {
    pub square: (BigInt, BigInt),
    pub a: PlanePt,
    pub b: PlanePt,
}

pub fn floor_rat(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

fn is_integer(x: &Rat) -> bool {
    x.is_integer()
}

/// Splits the segment from `z0` to `z0 + (dx, dy)` at its crossings with the
/// integer grid lines. Interior grid-point hits are rejected: the callers
/// choose lines that only meet the lattice at segment endpoints, if at all.
pub fn walk_segment(z0: &PlanePt, dx: &BigInt, dy: &BigInt) -> Result<Vec<Piece>> {
    let mut cuts: Vec<Rat> = Vec::new();
    collect_line_cuts(&z0.x, dx, &mut cuts);
    collect_line_cuts(&z0.y, dy, &mut cuts);
    cuts.sort();
    for w in cuts.windows(2) {
        ensure_internal!(
            w[0] != w[1],
            "segment passes through an interior lattice point"
        );
    }

    let point_at = |t: &Rat| PlanePt {
        x: &z0.x + Rat::from_integer(dx.clone()) * t,
        y: &z0.y + Rat::from_integer(dy.clone()) * t,
    };

    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(Rat::zero());
    bounds.extend(cuts);
    bounds.push(Rat::one());

    let mut pieces = Vec::new();
    for w in bounds.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let a = point_at(&w[0]);
        let b = point_at(&w[1]);
        let mid = (&w[0] + &w[1]) / rat_int(2);
        let m = point_at(&mid);
        ensure_internal!(
            !is_integer(&m.x) && !is_integer(&m.y),
            "segment runs along a grid line"
        );
        pieces.push(Piece {
            square: (floor_rat(&m.x), floor_rat(&m.y)),
            a,
            b,
        });
    }
    Ok(pieces)
}

fn collect_line_cuts(start: &Rat, delta: &BigInt, cuts: &mut Vec<Rat>) {
    if delta.is_zero() {
        return;
    }
    let end = start + Rat::from_integer(delta.clone());
    let (lo, hi) = if delta.is_positive() {
        (start.clone(), end)
    } else {
        (end, start.clone())
    };
    let mut k = floor_rat(&lo) + 1u32;
    // Lines x = k strictly between lo and hi, plus endpoints that are integers
    // themselves are excluded: t in (0, 1) only.
    let hi_int = floor_rat(&hi);
    while k <= hi_int {
        let kk = Rat::from_integer(k.clone());
        if kk > lo && kk < hi {
            let t = (kk - start) / Rat::from_integer(delta.clone());
            cuts.push(t);
        }
        k += 1u32;
    }
}

/// Chart coordinates of a plane point within a given unit square: each
/// coordinate keeps its offset for even squares and is reflected for odd
/// ones, matching how the pillow covering folds the plane.
pub fn chart_of(p: &PlanePt, square: &(BigInt, BigInt)) -> (Rat, Rat) {
    let u = &p.x - Rat::from_integer(square.0.clone());
    let v = &p.y - Rat::from_integer(square.1.clone());
    (fold_unit(&square.0, u), fold_unit(&square.1, v))
}

pub fn fold_unit(k: &BigInt, t: Rat) -> Rat {
    if (k % 2u32).is_zero() {
        t
    } else {
        Rat::one() - t
    }
}

pub fn square_is_white(square: &(BigInt, BigInt)) -> bool {
    ((&square.0 + &square.1) % 2u32).is_zero()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossKind {
    Proper,
    None,
    Degenerate,
}

fn orient(a: &(Rat, Rat), b: &(Rat, Rat), c: &(Rat, Rat)) -> i8 {
    let v = (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Classifies how two closed segments intersect: a single transversal
/// interior crossing, no intersection, or anything degenerate (touching
/// endpoints, collinear overlap). Callers that need exact crossing counts
/// re-draw their configuration when a degenerate pair shows up.
pub fn segment_crossing(
    a1: &(Rat, Rat),
    a2: &(Rat, Rat),
    b1: &(Rat, Rat),
    b2: &(Rat, Rat),
) -> CrossKind {
    let o1 = orient(a1, a2, b1);
    let o2 = orient(a1, a2, b2);
    let o3 = orient(b1, b2, a1);
    let o4 = orient(b1, b2, a2);
    if o1 == 0 || o2 == 0 || o3 == 0 || o4 == 0 {
        // A zero orientation with the other segment's span overlapping means
        // an endpoint touch or collinearity.
        if (o1 == 0 && on_segment(a1, a2, b1))
            || (o2 == 0 && on_segment(a1, a2, b2))
            || (o3 == 0 && on_segment(b1, b2, a1))
            || (o4 == 0 && on_segment(b1, b2, a2))
        {
            return CrossKind::Degenerate;
        }
        return CrossKind::None;
    }
    if o1 != o2 && o3 != o4 {
        CrossKind::Proper
    } else {
        CrossKind::None
    }
}

fn on_segment(a: &(Rat, Rat), b: &(Rat, Rat), p: &(Rat, Rat)) -> bool {
    let min_x = a.0.clone().min(b.0.clone());
    let max_x = a.0.clone().max(b.0.clone());
    let min_y = a.1.clone().min(b.1.clone());
    let max_y = a.1.clone().max(b.1.clone());
    p.0 >= min_x && p.0 <= max_x && p.1 >= min_y && p.1 <= max_y
}

/// Solves `p*r + q*s = 1` for coprime `(r, s)`.
pub fn bezout(r: &BigInt, s: &BigInt) -> Result<(BigInt, BigInt)> {
    let e = r.extended_gcd(s);
    ensure_internal!(e.gcd.is_one(), "bezout called on non-coprime pair");
    Ok((e.x, e.y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_straight_line() {
        // Slope-1 line offset by 1/5, one full period.
        let z0 = PlanePt::new(rat(1, 2), rat(1, 2) - rat(1, 5));
        let pieces = walk_segment(&z0, &BigInt::from(2), &BigInt::from(2)).unwrap();
        assert_eq!(pieces.len(), 5);
        for p in &pieces {
            assert!(p.a != p.b);
        }
        // Last piece ends exactly at the translated start.
        let last = pieces.last().unwrap();
        assert_eq!(last.b.x, &z0.x + rat_int(2));
    }

    #[test]
    fn walk_rejects_lattice_interior() {
        let z0 = PlanePt::new(rat(-1, 2), rat(-1, 2));
        assert!(walk_segment(&z0, &BigInt::from(2), &BigInt::from(2)).is_err());
    }

    #[test]
    fn chart_folding() {
        let p = PlanePt::new(rat(7, 5), rat(-1, 3));
        let sq = (BigInt::from(1), BigInt::from(-1));
        let (x, y) = chart_of(&p, &sq);
        assert_eq!(x, rat(3, 5));
        assert_eq!(y, rat(1, 3));
        assert!(!square_is_white(&sq));
    }

    #[test]
    fn crossing_classification() {
        let a = (rat_int(0), rat_int(0));
        let b = (rat_int(2), rat_int(2));
        let c = (rat_int(0), rat_int(2));
        let d = (rat_int(2), rat_int(0));
        assert_eq!(segment_crossing(&a, &b, &c, &d), CrossKind::Proper);
        let e = (rat_int(1), rat_int(1));
        assert_eq!(segment_crossing(&a, &e, &c, &d), CrossKind::Degenerate);
        let f = (rat_int(3), rat_int(0));
        let g = (rat_int(4), rat_int(0));
        assert_eq!(segment_crossing(&a, &b, &f, &g), CrossKind::None);
    }

    #[test]
    fn bezout_solves() {
        let (p, q) = bezout(&BigInt::from(3), &BigInt::from(25)).unwrap();
        assert_eq!(p * 3 + q * 25, BigInt::from(1));
    }
}
