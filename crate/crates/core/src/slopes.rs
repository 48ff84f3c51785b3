//! Exact arithmetic of extended slopes.
//!
//! A slope `r/s` labels the isotopy class of an essential Jordan curve on the
//! square pillow with its four marked vertices; the symbol `o` (peripheral)
//! labels all peripheral classes. Slopes are kept reduced with `s >= 0`, and
//! `r = 1` whenever `s = 0` (the vertical class, printed `inf`).

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use crate::error::{input_err, Error, Result};

/// An element of the extended rationals together with the peripheral symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedSlope {
    Rational { r: BigInt, s: BigInt },
    Peripheral,
}

/// The complexity `|r| + s` of a slope; `0` exactly for the peripheral symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Complexity(pub BigInt);

impl ExtendedSlope {
    pub fn rational(r: i64, s: i64) -> Result<ExtendedSlope> {
        normalize_slope(BigInt::from(r), BigInt::from(s))
    }

    pub fn horizontal() -> ExtendedSlope {
        ExtendedSlope::Rational {
            r: BigInt::zero(),
            s: BigInt::one(),
        }
    }

    pub fn vertical() -> ExtendedSlope {
        ExtendedSlope::Rational {
            r: BigInt::one(),
            s: BigInt::zero(),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExtendedSlope::Rational { .. })
    }

    /// Numerator/denominator of a rational slope.
    pub fn parts(&self) -> Result<(&BigInt, &BigInt)> {
        match self {
            ExtendedSlope::Rational { r, s } => Ok((r, s)),
            ExtendedSlope::Peripheral => Err(Error::Precondition(
                "operation requires a rational slope, got the peripheral symbol".into(),
            )),
        }
    }

    /// An integer slope `k/1` or the vertical slope `1/0`.
    pub fn is_integer_or_vertical(&self) -> bool {
        match self {
            ExtendedSlope::Rational { s, .. } => s.is_one() || s.is_zero(),
            ExtendedSlope::Peripheral => false,
        }
    }
}

/// Reduce `(r, s)` to the canonical representative: divide by the gcd and
/// flip both signs so that `s >= 0`; the class of `s = 0` is always `1/0`.
pub fn normalize_slope(r: BigInt, s: BigInt) -> Result<ExtendedSlope> {
    if r.is_zero() && s.is_zero() {
        return Err(input_err!("slope 0/0 is undefined"));
    }
    let g = r.gcd(&s);
    let (mut r, mut s) = (r / &g, s / &g);
    if s.is_negative() || (s.is_zero() && r.is_negative()) {
        r = -r;
        s = -s;
    }
    Ok(ExtendedSlope::Rational { r, s })
}

pub fn complexity(x: &ExtendedSlope) -> Complexity {
    match x {
        ExtendedSlope::Peripheral => Complexity(BigInt::zero()),
        ExtendedSlope::Rational { r, s } => Complexity(r.abs() + s),
    }
}

/// Geometric intersection number of the essential curves with slopes `x`, `y`:
/// `0` for equal slopes and `2|rs' - sr'|` otherwise.
pub fn intersection_curves(x: &ExtendedSlope, y: &ExtendedSlope) -> Result<BigInt> {
    let (r, s) = x.parts()?;
    let (rp, sp) = y.parts()?;
    Ok(BigInt::from(2) * (r * sp - s * rp).abs())
}

/// Intersection number of the curve with slope `x` and a core arc of the
/// curve with slope `y`: half of `intersection_curves`.
pub fn intersection_curve_arc(x: &ExtendedSlope, y: &ExtendedSlope) -> Result<BigInt> {
    let (r, s) = x.parts()?;
    let (rp, sp) = y.parts()?;
    Ok((r * sp - s * rp).abs())
}

/// Every reduced slope with `|r| + s <= max_complexity`, each exactly once,
/// ordered by complexity and then by numerator; the peripheral symbol is
/// appended last when requested.
pub fn enumerate_slopes(max_complexity: u64, include_peripheral: bool) -> Vec<ExtendedSlope> {
    let mut out = Vec::new();
    for k in 1..=max_complexity as i64 {
        for r in -k..=k {
            let s = k - r.abs();
            if s == 0 && r != 1 {
                continue;
            }
            if num::integer::gcd(r.abs(), s) == 1 {
                out.push(ExtendedSlope::Rational {
                    r: BigInt::from(r),
                    s: BigInt::from(s),
                });
            }
        }
    }
    if include_peripheral {
        out.push(ExtendedSlope::Peripheral);
    }
    out
}

impl fmt::Display for ExtendedSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedSlope::Peripheral => write!(f, "peripheral"),
            ExtendedSlope::Rational { r, s } => {
                if s.is_zero() {
                    write!(f, "inf")
                } else {
                    write!(f, "{}/{}", r, s)
                }
            }
        }
    }
}

impl FromStr for ExtendedSlope {
    type Err = Error;

    fn from_str(text: &str) -> Result<ExtendedSlope> {
        match text {
            "inf" => return Ok(ExtendedSlope::vertical()),
            "o" => return Ok(ExtendedSlope::Peripheral),
            _ => {}
        }
        let (num, den) = text
            .split_once('/')
            .ok_or_else(|| input_err!("malformed slope {text:?}: expected r/s, inf, or o"))?;
        let r = BigInt::from_str(num.trim())
            .map_err(|_| input_err!("malformed slope numerator {num:?}"))?;
        let s = BigInt::from_str(den.trim())
            .map_err(|_| input_err!("malformed slope denominator {den:?}"))?;
        normalize_slope(r, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn slope(r: i64, s: i64) -> ExtendedSlope {
        ExtendedSlope::rational(r, s).unwrap()
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(slope(4, 6), slope(2, 3));
        assert_eq!(slope(-3, 0), ExtendedSlope::vertical());
        assert_eq!(slope(2, -1), slope(-2, 1));
        assert!(normalize_slope(BigInt::zero(), BigInt::zero()).is_err());
    }

    #[test]
    fn complexity_examples() {
        assert_eq!(complexity(&ExtendedSlope::Peripheral).0, BigInt::zero());
        assert_eq!(complexity(&slope(3, 25)).0, BigInt::from(28));
        assert_eq!(complexity(&ExtendedSlope::vertical()).0, BigInt::one());
    }

    #[test]
    fn intersection_examples() {
        let ins = |x: &ExtendedSlope, y: &ExtendedSlope| intersection_curves(x, y).unwrap();
        assert_eq!(ins(&slope(0, 1), &slope(1, 0)), BigInt::from(2));
        assert_eq!(ins(&slope(2, 1), &slope(0, 1)), BigInt::from(4));
        assert_eq!(ins(&slope(5, 7), &slope(5, 7)), BigInt::zero());
        assert!(intersection_curves(&ExtendedSlope::Peripheral, &slope(0, 1)).is_err());

        let arc = |x: &ExtendedSlope, y: &ExtendedSlope| intersection_curve_arc(x, y).unwrap();
        assert_eq!(arc(&slope(2, 1), &slope(0, 1)), BigInt::from(2));
        assert_eq!(arc(&slope(2, 1), &slope(1, 0)), BigInt::one());
        assert_eq!(arc(&slope(3, 4), &slope(3, 4)), BigInt::zero());
    }

    #[test]
    fn enumeration_small() {
        assert_eq!(
            enumerate_slopes(1, false),
            vec![slope(0, 1), ExtendedSlope::vertical()]
        );
        let two = enumerate_slopes(2, false);
        assert_eq!(
            two,
            vec![
                slope(0, 1),
                ExtendedSlope::vertical(),
                slope(-1, 1),
                slope(1, 1)
            ]
        );
        assert_eq!(enumerate_slopes(8, false).len(), 44);
        assert_eq!(enumerate_slopes(8, true).len(), 45);
    }

    #[test]
    fn enumeration_agrees_with_double_loop() {
        // Independent brute force over raw coprime pairs.
        let bound = 13i64;
        let mut expected = std::collections::BTreeSet::new();
        for r in -bound..=bound {
            for s in 0..=bound {
                if (r, s) == (0, 0) || r.abs() + s > bound {
                    continue;
                }
                if s == 0 && r != 1 {
                    continue;
                }
                if num::integer::gcd(r.abs(), s) == 1 {
                    expected.insert((r, s));
                }
            }
        }
        let got: std::collections::BTreeSet<(i64, i64)> = enumerate_slopes(bound as u64, false)
            .iter()
            .map(|x| {
                let (r, s) = x.parts().unwrap();
                (
                    i64::try_from(r).unwrap(),
                    i64::try_from(s).unwrap(),
                )
            })
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn text_round_trip() {
        for text in ["0/1", "-7/3", "inf", "peripheral"] {
            let parsed: ExtendedSlope = match text {
                "peripheral" => "o".parse().unwrap(),
                _ => text.parse().unwrap(),
            };
            assert_eq!(parsed.to_string(), text);
        }
        assert_eq!("1/0".parse::<ExtendedSlope>().unwrap(), ExtendedSlope::vertical());
        assert!("1.5".parse::<ExtendedSlope>().is_err());
        assert!("0/0".parse::<ExtendedSlope>().is_err());
    }

    proptest! {
        #[test]
        fn intersection_symmetric_and_definite(r1 in -40i64..40, s1 in 0i64..40, r2 in -40i64..40, s2 in 0i64..40) {
            prop_assume!((r1, s1) != (0, 0) && (r2, s2) != (0, 0));
            let x = slope(r1, s1);
            let y = slope(r2, s2);
            let xy = intersection_curves(&x, &y).unwrap();
            let yx = intersection_curves(&y, &x).unwrap();
            prop_assert_eq!(&xy, &yx);
            prop_assert_eq!(xy.is_zero(), x == y);
            // Curve/arc ratio from the intersection formulas.
            let arc = intersection_curve_arc(&x, &y).unwrap();
            prop_assert_eq!(xy, BigInt::from(2) * arc);
        }

        #[test]
        fn normalize_idempotent(r in -1000i64..1000, s in -1000i64..1000) {
            prop_assume!((r, s) != (0, 0));
            let once = slope(r, s);
            let (rr, ss) = once.parts().unwrap();
            let twice = normalize_slope(rr.clone(), ss.clone()).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn enumeration_no_duplicates_and_bounded(k in 1u64..12) {
            let all = enumerate_slopes(k, false);
            let set: std::collections::HashSet<_> = all.iter().cloned().collect();
            prop_assert_eq!(set.len(), all.len());
            for x in &all {
                prop_assert!(complexity(x).0 <= BigInt::from(k));
            }
        }
    }
}
