//! Real components: root enclosures of the cubic and integral points on the egg.

use rug::{Integer, Rational};
use serde::Serialize;

use super::{Curve, QPoint};
use crate::arith::isqrt;

/// Closed rational interval containing one real root of the cubic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootEnclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootEnclosure {
    pub fn width(&self) -> Rational {
        Rational::from(&self.hi - &self.lo)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        (Rational::from(&self.lo + &self.hi) / 2u32).to_f64()
    }
}

impl Serialize for RootEnclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.lo.to_string(), self.hi.to_string()).serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EggProfile {
    pub has_egg: bool,
    /// Increasing; three enclosures when there is an egg, otherwise one.
    pub roots: Vec<RootEnclosure>,
    /// Integral points with x between the two smallest roots, sorted.
    pub egg_integral_points: Vec<QPoint>,
}

fn cubic_q(curve: &Curve, x: &Rational) -> Rational {
    let mut v = Rational::from(x + curve.a());
    v *= x;
    v += curve.b();
    v *= x;
    v += curve.c();
    v
}

/// Bisect `[lo, hi]` where the cubic changes sign until the width is below 1/4.
fn bisect(curve: &Curve, mut lo: Rational, mut hi: Rational) -> RootEnclosure {
    let quarter = Rational::from((1, 4));
    let lo_sign = cubic_q(curve, &lo).cmp0();
    debug_assert_ne!(lo_sign, cubic_q(curve, &hi).cmp0());
    while Rational::from(&hi - &lo) >= quarter {
        let mid = Rational::from(&lo + &hi) / 2u32;
        let s = cubic_q(curve, &mid).cmp0();
        if s == std::cmp::Ordering::Equal {
            return RootEnclosure {
                lo: mid.clone(),
                hi: mid,
            };
        }
        if s == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RootEnclosure { lo, hi }
}

/// Rational points near the two critical points of the cubic at which it is
/// strictly positive (left) and strictly negative (right).
fn separators(curve: &Curve) -> (Rational, Rational) {
    let a = curve.a();
    let d = Integer::from(a.square_ref()) - Integer::from(3u32 * curve.b());
    debug_assert!(d > 0);
    let mut bits = 8u32;
    loop {
        let scaled = Integer::from(&d << (2 * bits));
        let (s, _) = isqrt(&scaled).expect("nonnegative");
        let s = Rational::from((s, Integer::from(Integer::u_pow_u(2, bits))));
        let q1 = (Rational::from(-a.clone()) - &s) / 3u32;
        let q2 = (Rational::from(-a.clone()) + &s) / 3u32;
        if cubic_q(curve, &q1) > 0 && cubic_q(curve, &q2) < 0 {
            return (q1, q2);
        }
        bits *= 2;
    }
}

/// Root enclosures and the integral points on the bounded real component.
pub fn egg_profile(curve: &Curve) -> EggProfile {
    let bound = [curve.a(), curve.b(), curve.c()]
        .iter()
        .map(|v| Integer::from(v.abs_ref()))
        .max()
        .unwrap()
        + 1u32;
    let far_lo = Rational::from(-bound.clone());
    let far_hi = Rational::from(bound);

    if *curve.disc() < 0 {
        return EggProfile {
            has_egg: false,
            roots: vec![bisect(curve, far_lo, far_hi)],
            egg_integral_points: Vec::new(),
        };
    }

    let (q1, q2) = separators(curve);
    let r1 = bisect(curve, far_lo, q1.clone());
    let r2 = bisect(curve, q1, q2.clone());
    let r3 = bisect(curve, q2, far_hi);

    // every integer in [ceil(r1.lo), floor(r2.hi)] lies left of r3, so a
    // nonnegative cubic value there means the point is on the egg
    let start = r1.lo.clone().ceil().numer().clone();
    let end = r2.hi.clone().floor().numer().clone();
    let points = integral_points_between(curve, &start, &end);
    EggProfile {
        has_egg: true,
        roots: vec![r1, r2, r3],
        egg_integral_points: points,
    }
}

/// Integral points with `lo <= x <= hi`, sorted by x then y.
pub fn integral_points_between(curve: &Curve, lo: &Integer, hi: &Integer) -> Vec<QPoint> {
    let mut out = Vec::new();
    let mut x = lo.clone();
    while x <= *hi {
        let v = curve.cubic_at(&x);
        if v >= 0 {
            let (y, exact) = isqrt(&v).expect("nonnegative");
            if exact {
                if y != 0 {
                    out.push(QPoint::Affine {
                        m: x.clone(),
                        n: Integer::from(-&y),
                        e: Integer::from(1),
                    });
                }
                out.push(QPoint::Affine {
                    m: x.clone(),
                    n: y,
                    e: Integer::from(1),
                });
            }
        }
        x += 1u32;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> QPoint {
        QPoint::from_ints(x, y, 1).unwrap()
    }

    #[test]
    fn egg_of_the_199_curve() {
        let c = Curve::new(-199, -1, 0).unwrap();
        let e = egg_profile(&c);
        assert!(e.has_egg);
        assert_eq!(e.roots.len(), 3);
        let approx = [-0.005_025, 0.0, 199.005_025];
        for (r, want) in e.roots.iter().zip(approx) {
            assert!(r.width() < (1, 4));
            assert!(r.lo.to_f64() <= want + 1e-6 && want - 1e-6 <= r.hi.to_f64(), "{r:?}");
        }
        assert!(e.roots[0].hi <= e.roots[1].lo && e.roots[1].hi <= e.roots[2].lo);
        assert_eq!(e.egg_integral_points, vec![pt(0, 0)]);
    }

    #[test]
    fn egg_of_the_cm_curve() {
        let c = Curve::new(0, -2, 0).unwrap();
        let e = egg_profile(&c);
        assert!(e.has_egg);
        let s = 2f64.sqrt();
        assert!(e.roots[0].contains(&Rational::from_f64(-s).unwrap()));
        assert!(e.roots[2].contains(&Rational::from_f64(s).unwrap()));
        assert_eq!(e.egg_integral_points, vec![pt(-1, -1), pt(-1, 1), pt(0, 0)]);
    }

    #[test]
    fn no_egg_for_negative_discriminant() {
        let c = Curve::new(0, 0, 2).unwrap();
        let e = egg_profile(&c);
        assert!(!e.has_egg);
        assert_eq!(e.roots.len(), 1);
        assert!(e.roots[0].contains(&Rational::from_f64(-(2f64.cbrt())).unwrap()));
        assert!(e.egg_integral_points.is_empty());
    }

    #[test]
    fn nose_scan_of_the_cm_curve() {
        let c = Curve::new(0, -2, 0).unwrap();
        let pts = integral_points_between(&c, &Integer::from(2), &Integer::from(2));
        assert_eq!(pts, vec![pt(2, -2), pt(2, 2)]);
    }
}
