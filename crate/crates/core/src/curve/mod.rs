//! Curves y^2 = x^3 + a x^2 + b x + c with integer coefficients, and exact
//! rational points in (m/e^2, n/e^3) form.

mod egg;
mod modp;

pub use egg::{egg_profile, integral_points_between, EggProfile, RootEnclosure};
pub use modp::{
    count_points_bruteforce, is_singular_reduction, order_mod_p, reduce_projective, ModCurve, ModPoint,
    ProjectiveResidue,
};

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::isqrt;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Curve {
    a: Integer,
    b: Integer,
    c: Integer,
    disc: Integer,
    cubic_disc: Integer,
}

impl Curve {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>) -> Result<Self> {
        let (a, b, c) = (a.into(), b.into(), c.into());
        let cubic_disc = cubic_discriminant(&a, &b, &c);
        let disc = discriminant(&a, &b, &c);
        debug_assert_eq!(disc, Integer::from(&cubic_disc * 16u32));
        if disc == 0 {
            return Err(Error::SingularCurve);
        }
        Ok(Curve {
            a,
            b,
            c,
            disc,
            cubic_disc,
        })
    }

    pub fn a(&self) -> &Integer {
        &self.a
    }
    pub fn b(&self) -> &Integer {
        &self.b
    }
    pub fn c(&self) -> &Integer {
        &self.c
    }

    /// -64a^3c + 16a^2b^2 + 288abc - 64b^3 - 432c^2, i.e. 16 times the
    /// discriminant of the cubic.
    pub fn disc(&self) -> &Integer {
        &self.disc
    }

    /// Discriminant of the cubic; `disc = 16 * cubic_disc`.
    pub fn cubic_disc(&self) -> &Integer {
        &self.cubic_disc
    }

    /// The cubic x^3 + ax^2 + bx + c at an integer.
    pub fn cubic_at(&self, x: &Integer) -> Integer {
        let mut v = Integer::from(x + &self.a);
        v *= x;
        v += &self.b;
        v *= x;
        v += &self.c;
        v
    }

    /// m^3 + a m^2 e^2 + b m e^4 + c e^6.
    pub fn weighted_rhs(&self, m: &Integer, e: &Integer) -> Integer {
        let e2 = Integer::from(e.square_ref());
        let mut v = m + Integer::from(&self.a * &e2);
        v *= m;
        let e4 = Integer::from(e2.square_ref());
        v += Integer::from(&self.b * &e4);
        v *= m;
        v += Integer::from(&self.c * &e4) * &e2;
        v
    }

    pub fn contains(&self, p: &QPoint) -> bool {
        match p {
            QPoint::Identity => true,
            QPoint::Affine { m, n, e } => Integer::from(n.square_ref()) == self.weighted_rhs(m, e),
        }
    }

    /// Validated point constructor.
    pub fn point(&self, m: impl Into<Integer>, n: impl Into<Integer>, e: impl Into<Integer>) -> Result<QPoint> {
        let p = QPoint::new(m.into(), n.into(), e.into())?;
        if !self.contains(&p) {
            return Err(Error::NotOnCurve);
        }
        Ok(p)
    }

    pub fn neg(&self, p: &QPoint) -> QPoint {
        match p {
            QPoint::Identity => QPoint::Identity,
            QPoint::Affine { m, n, e } => QPoint::Affine {
                m: m.clone(),
                n: Integer::from(-n),
                e: e.clone(),
            },
        }
    }

    /// Duplication through the integer formula, keeping the unreduced
    /// numerator and denominator of X(2S).
    pub fn double(&self, s: &QPoint) -> Result<Doubling> {
        let (m, n, e) = match s {
            QPoint::Identity => return Err(Error::DoublingToIdentity),
            QPoint::Affine { m, n, e } => (m, n, e),
        };
        if *n == 0 {
            return Err(Error::DoublingToIdentity);
        }
        let (num, den) = self.duplication_fraction(m, n, e);
        let g = Integer::from(num.gcd_ref(&den));
        let (tau, exact) = isqrt(&g)?;
        if !exact {
            return Err(Error::Verification(format!(
                "gcd of the duplication fraction is not a square: {g}"
            )));
        }
        let m2 = Integer::from(num.div_exact_ref(&g));
        let e2 = Integer::from(n * e).abs() * 2u32 / &tau;

        // y(2S) from the tangent line, scaled by e2^3; f = e2/e.
        let (f, rem) = e2.clone().div_rem(e.clone());
        if rem != 0 {
            return Err(Error::Verification(
                "denominator of S does not divide that of 2S".into(),
            ));
        }
        let e_sq = Integer::from(e.square_ref());
        let slope_num = (3u32 * Integer::from(m.square_ref()))
            + Integer::from(&self.a * m) * 2u32 * &e_sq
            + (&self.b * Integer::from(e_sq.square_ref()));
        let f_sq = Integer::from(f.square_ref());
        let mut t = Integer::from(m * &f_sq) - &m2;
        t *= &slope_num;
        t *= &f;
        let two_n = Integer::from(n * 2u32);
        if !t.is_divisible(&two_n) {
            return Err(Error::Verification("tangent ordinate is not integral".into()));
        }
        t.div_exact_mut(&two_n);
        let n2 = t - Integer::from(n * &f_sq) * &f;

        let point = QPoint::Affine { m: m2, n: n2, e: e2 };
        debug_assert!(self.contains(&point));
        Ok(Doubling {
            point,
            numerator: num,
            denominator: den,
            tau,
        })
    }

    /// `(A, B)` with X(2S) = A/B before cancellation.
    pub fn duplication_fraction(&self, m: &Integer, n: &Integer, e: &Integer) -> (Integer, Integer) {
        let e2 = Integer::from(e.square_ref());
        let e4 = Integer::from(e2.square_ref());
        let e6 = Integer::from(&e4 * &e2);
        let e8 = Integer::from(e4.square_ref());
        let m2 = Integer::from(m.square_ref());
        let mut a = Integer::from(m2.square_ref());
        a -= Integer::from(2u32 * &self.b) * &m2 * &e4;
        a -= Integer::from(8u32 * &self.c) * m * &e6;
        let lead = Integer::from(self.b.square_ref()) - Integer::from(4u32 * &self.a) * &self.c;
        a += lead * e8;
        let b = Integer::from(n.square_ref()) * e2 * 4u32;
        (a, b)
    }

    pub fn add(&self, s: &QPoint, t: &QPoint) -> QPoint {
        let ((m1, n1, e1), (m2, n2, e2)) = match (s, t) {
            (QPoint::Identity, _) => return t.clone(),
            (_, QPoint::Identity) => return s.clone(),
            (QPoint::Affine { m, n, e }, QPoint::Affine { m: mm, n: nn, e: ee }) => ((m, n, e), (mm, nn, ee)),
        };
        let x1 = Rational::from((m1.clone(), Integer::from(e1.square_ref())));
        let x2 = Rational::from((m2.clone(), Integer::from(e2.square_ref())));
        let y1 = Rational::from((n1.clone(), Integer::from(e1.pow(3))));
        let y2 = Rational::from((n2.clone(), Integer::from(e2.pow(3))));
        if x1 == x2 {
            if y1 == Rational::from(-&y2) {
                return QPoint::Identity;
            }
            return self.double(s).expect("doubling a point with nonzero ordinate").point;
        }
        let lambda = Rational::from(&y2 - &y1) / Rational::from(&x2 - &x1);
        let x3 = Rational::from(lambda.square_ref()) - &self.a - &x1 - &x2;
        let y3 = lambda * Rational::from(&x1 - &x3) - y1;
        QPoint::from_affine(&x3, &y3).expect("sum of points on an integral model")
    }

    pub fn sub(&self, s: &QPoint, t: &QPoint) -> QPoint {
        self.add(s, &self.neg(t))
    }

    /// `k*S` by double-and-add; negative `k` allowed.
    pub fn mul(&self, k: i64, s: &QPoint) -> QPoint {
        let mut acc = QPoint::Identity;
        let base = if k < 0 { self.neg(s) } else { s.clone() };
        let k = k.unsigned_abs();
        for bit in (0..64 - k.leading_zeros()).rev() {
            acc = self.add(&acc, &acc);
            if (k >> bit) & 1 == 1 {
                acc = self.add(&acc, &base);
            }
        }
        acc
    }

    /// Multiples `S, 2S, ..., limit*S`, stopping early at the identity.
    pub fn multiples(&self, s: &QPoint, limit: u32) -> Vec<QPoint> {
        let mut out = Vec::with_capacity(limit as usize);
        let mut cur = s.clone();
        for _ in 0..limit {
            out.push(cur.clone());
            if cur.is_identity() {
                break;
            }
            cur = self.add(&cur, s);
        }
        out
    }

    /// Smallest `l <= bound` with `l*S` the identity.
    pub fn torsion_order(&self, s: &QPoint, bound: u32) -> Option<u32> {
        self.multiples(s, bound)
            .iter()
            .position(QPoint::is_identity)
            .map(|i| i as u32 + 1)
    }

    /// The curve under x -> x + t, so that a point with X = t moves to X = 0.
    pub fn shift_x(&self, t: &Integer) -> Curve {
        let a = &self.a + Integer::from(3u32 * t);
        let b = (&self.b + Integer::from(&self.a * t) * 2u32)
            + (3u32 * Integer::from(t.square_ref()));
        let c = self.cubic_at(t);
        Curve::new(a, b, c).expect("translation preserves the discriminant")
    }

    /// Image of a point under [`Curve::shift_x`].
    pub fn shift_point(&self, t: &Integer, p: &QPoint) -> QPoint {
        match p {
            QPoint::Identity => QPoint::Identity,
            QPoint::Affine { m, n, e } => QPoint::Affine {
                m: (m - Integer::from(e.square_ref()) * t),
                n: n.clone(),
                e: e.clone(),
            },
        }
    }
}

impl std::fmt::Display for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "y^2 = x^3 + ({})x^2 + ({})x + ({})", self.a, self.b, self.c)
    }
}

pub fn discriminant(a: &Integer, b: &Integer, c: &Integer) -> Integer {
    let a2 = Integer::from(a.square_ref());
    let a3 = Integer::from(&a2 * a);
    let b2 = Integer::from(b.square_ref());
    let b3 = Integer::from(&b2 * b);
    let c2 = Integer::from(c.square_ref());
    -64 * a3 * c + 16 * a2 * b2 + 288 * Integer::from(a * b) * c - 64 * b3 - 432 * c2
}

pub fn cubic_discriminant(a: &Integer, b: &Integer, c: &Integer) -> Integer {
    let a2 = Integer::from(a.square_ref());
    let a3 = Integer::from(&a2 * a);
    let b2 = Integer::from(b.square_ref());
    let b3 = Integer::from(&b2 * b);
    let c2 = Integer::from(c.square_ref());
    -4 * a3 * c + a2 * b2 + 18 * Integer::from(a * b) * c - 4 * b3 - 27 * c2
}

/// Result of [`Curve::double`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Doubling {
    pub point: QPoint,
    /// A in X(2S) = A/B before cancellation.
    pub numerator: Integer,
    /// B = 4 n^2 e^2.
    pub denominator: Integer,
    /// sqrt(gcd(A, B)), nonnegative.
    pub tau: Integer,
}

/// A rational point `(m/e^2, n/e^3)` with `e > 0`, `gcd(m, e) = gcd(n, e) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QPoint {
    Identity,
    Affine { m: Integer, n: Integer, e: Integer },
}

impl QPoint {
    pub fn new(m: Integer, n: Integer, e: Integer) -> Result<Self> {
        if e <= 0 {
            return Err(Error::InvalidPoint(format!(
                "denominator root e = {e} must be positive"
            )));
        }
        if Integer::from(m.gcd_ref(&e)) != 1 || Integer::from(n.gcd_ref(&e)) != 1 {
            return Err(Error::InvalidPoint(format!("({m}, {n}, {e}) is not in lowest terms")));
        }
        Ok(QPoint::Affine { m, n, e })
    }

    pub fn from_ints(m: i64, n: i64, e: i64) -> Result<Self> {
        Self::new(m.into(), n.into(), e.into())
    }

    /// From affine rational coordinates; the denominators must be `e^2`, `e^3`.
    pub fn from_affine(x: &Rational, y: &Rational) -> Result<Self> {
        let (e, exact) = isqrt(x.denom())?;
        if !exact || *y.denom() != Integer::from((&e).pow(3)) {
            return Err(Error::InvalidPoint(format!("({x}, {y}) has no (m, n, e) form")));
        }
        Ok(QPoint::Affine {
            m: x.numer().clone(),
            n: y.numer().clone(),
            e,
        })
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, QPoint::Identity)
    }

    pub fn m(&self) -> Option<&Integer> {
        match self {
            QPoint::Affine { m, .. } => Some(m),
            QPoint::Identity => None,
        }
    }

    pub fn n(&self) -> Option<&Integer> {
        match self {
            QPoint::Affine { n, .. } => Some(n),
            QPoint::Identity => None,
        }
    }

    pub fn e(&self) -> Option<&Integer> {
        match self {
            QPoint::Affine { e, .. } => Some(e),
            QPoint::Identity => None,
        }
    }

    /// Whether `d` divides the denominator root `e`; the identity counts as
    /// divisible by everything.
    pub fn e_divisible_by(&self, d: &Integer) -> bool {
        match self {
            QPoint::Identity => true,
            QPoint::Affine { e, .. } => e.is_divisible(d),
        }
    }

    pub fn x(&self) -> Option<Rational> {
        match self {
            QPoint::Affine { m, e, .. } => Some(Rational::from((m.clone(), Integer::from(e.square_ref())))),
            QPoint::Identity => None,
        }
    }

    pub fn y(&self) -> Option<Rational> {
        match self {
            QPoint::Affine { n, e, .. } => Some(Rational::from((n.clone(), Integer::from(e.pow(3))))),
            QPoint::Identity => None,
        }
    }
}

impl std::fmt::Display for QPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QPoint::Identity => write!(f, "O"),
            QPoint::Affine { m, n, e } if *e == 1 => write!(f, "({m}, {n})"),
            QPoint::Affine { m, n, e } => write!(f, "({m}/{e}^2, {n}/{e}^3)"),
        }
    }
}

/// `null` for the identity, otherwise the [`PointSpec`] object.
impl Serialize for QPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            QPoint::Identity => s.serialize_none(),
            QPoint::Affine { m, n, e } => PointSpec {
                m: m.clone(),
                n: n.clone(),
                e: e.clone(),
            }
            .serialize(s),
        }
    }
}

/// JSON form of a point: `{"m": "...", "n": "...", "e": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSpec {
    #[serde(with = "crate::intser")]
    pub m: Integer,
    #[serde(with = "crate::intser")]
    pub n: Integer,
    #[serde(with = "crate::intser", default = "one")]
    pub e: Integer,
}

fn one() -> Integer {
    Integer::from(1)
}

/// JSON curve file: `{"a", "b", "c", "P": {...}, "T": {...}?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(with = "crate::intser")]
    pub a: Integer,
    #[serde(with = "crate::intser")]
    pub b: Integer,
    #[serde(with = "crate::intser")]
    pub c: Integer,
    #[serde(rename = "P")]
    pub p: PointSpec,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<PointSpec>,
}

impl CurveSpec {
    /// Validated curve, base point and optional 2-torsion point.
    pub fn load(&self) -> Result<(Curve, QPoint, Option<QPoint>)> {
        let curve = Curve::new(self.a.clone(), self.b.clone(), self.c.clone())?;
        let p = curve.point(self.p.m.clone(), self.p.n.clone(), self.p.e.clone())?;
        let t = match &self.t {
            Some(t) => Some(curve.point(t.m.clone(), t.n.clone(), t.e.clone())?),
            None => None,
        };
        Ok((curve, p, t))
    }

    pub fn from_parts(curve: &Curve, p: &QPoint, t: Option<&QPoint>) -> Result<Self> {
        let spec = |q: &QPoint| match q {
            QPoint::Affine { m, n, e } => Ok(PointSpec {
                m: m.clone(),
                n: n.clone(),
                e: e.clone(),
            }),
            QPoint::Identity => Err(Error::InvalidPoint("identity has no affine coordinates".into())),
        };
        Ok(CurveSpec {
            a: curve.a.clone(),
            b: curve.b.clone(),
            c: curve.c.clone(),
            p: spec(p)?,
            t: t.map(spec).transpose()?,
        })
    }
}
