//! Reduction modulo a prime and the group law on E(F_p).

use std::collections::HashMap;

use rug::ops::{Pow, RemRounding};
use rug::Integer;

use super::{Curve, QPoint};
use crate::arith::{factorize, is_probable_prime, isqrt, FactorBudget};
use crate::error::{Error, Result};

/// Largest prime (in bits) accepted by [`order_mod_p`]; baby-step tables grow
/// like p^(1/4).
const ORDER_MAX_BITS: u32 = 90;

/// Projective point on the reduced curve, normalized so that `z` is 1 or the
/// point is `(0 : 1 : 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModPoint {
    pub x: Integer,
    pub y: Integer,
    pub z: Integer,
}

impl ModPoint {
    pub fn identity() -> Self {
        ModPoint {
            x: Integer::new(),
            y: Integer::from(1),
            z: Integer::new(),
        }
    }

    pub fn affine(x: Integer, y: Integer) -> Self {
        ModPoint {
            x,
            y,
            z: Integer::from(1),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.z == 0
    }
}

/// `(me : n : e^3)` reduced mod p with no normalization, valid for any prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveResidue {
    pub x: Integer,
    pub y: Integer,
    pub z: Integer,
}

pub fn reduce_projective(s: &QPoint, p: &Integer) -> ProjectiveResidue {
    match s {
        QPoint::Identity => ProjectiveResidue {
            x: Integer::new(),
            y: Integer::from(1),
            z: Integer::new(),
        },
        QPoint::Affine { m, n, e } => ProjectiveResidue {
            x: Integer::from(m * e).rem_euc(p),
            y: n.clone().rem_euc(p),
            z: Integer::from(e.pow(3)).rem_euc(p),
        },
    }
}

/// Whether the residue is a singular point of the reduced cubic: the
/// homogeneous form Y^2 Z - X^3 - aX^2 Z - bXZ^2 - cZ^3 and its three partial
/// derivatives all vanish mod p.
pub fn is_singular_reduction(curve: &Curve, r: &ProjectiveResidue, p: &Integer) -> bool {
    let (x, y, z) = (&r.x, &r.y, &r.z);
    let (a, b, c) = (curve.a(), curve.b(), curve.c());
    let x2 = Integer::from(x.square_ref());
    let z2 = Integer::from(z.square_ref());
    let xz = Integer::from(x * z);
    let y2 = Integer::from(y.square_ref());

    let form = Integer::from(&y2 * z)
        - Integer::from(&x2 * x)
        - Integer::from(a * &x2) * z
        - Integer::from(b * x) * &z2
        - Integer::from(c * &z2) * z;
    let dx = -3 * x2.clone() - 2 * Integer::from(a * &xz) - Integer::from(b * &z2);
    let dy = 2 * Integer::from(y * z);
    let dz = y2 - Integer::from(a * &x2) - 2 * Integer::from(b * &xz) - 3 * Integer::from(c * &z2);
    [form, dx, dy, dz].iter().all(|v| v.is_divisible(p))
}

/// E reduced modulo an odd prime of good reduction.
#[derive(Debug, Clone)]
pub struct ModCurve {
    a: Integer,
    b: Integer,
    c: Integer,
    p: Integer,
}

impl ModCurve {
    /// Rejects `p` dividing `6 * disc` and non-primes.
    pub fn new(curve: &Curve, p: &Integer) -> Result<Self> {
        if *p < 5 || !is_probable_prime(p) {
            return Err(Error::BadPrime {
                p: p.clone(),
                reason: "not a prime >= 5",
            });
        }
        if curve.disc().is_divisible(p) {
            return Err(Error::BadPrime {
                p: p.clone(),
                reason: "divides the discriminant",
            });
        }
        Ok(ModCurve {
            a: curve.a().clone().rem_euc(p),
            b: curve.b().clone().rem_euc(p),
            c: curve.c().clone().rem_euc(p),
            p: p.clone(),
        })
    }

    pub fn p(&self) -> &Integer {
        &self.p
    }

    fn md(&self, v: Integer) -> Integer {
        v.rem_euc(&self.p)
    }

    fn inv(&self, v: &Integer) -> Integer {
        v.clone()
            .invert(&self.p)
            .expect("nonzero residue modulo a prime is invertible")
    }

    pub fn cubic_at(&self, x: &Integer) -> Integer {
        let mut v = Integer::from(x + &self.a);
        v *= x;
        v += &self.b;
        v *= x;
        v += &self.c;
        self.md(v)
    }

    pub fn contains(&self, q: &ModPoint) -> bool {
        q.is_identity() || self.md(Integer::from(q.y.square_ref())) == self.cubic_at(&q.x)
    }

    /// `P mod p = (me : n : e^3)`, normalized.
    pub fn reduce(&self, s: &QPoint) -> ModPoint {
        let r = reduce_projective(s, &self.p);
        if r.z == 0 {
            return ModPoint::identity();
        }
        let zi = self.inv(&r.z);
        ModPoint::affine(self.md(r.x * &zi), self.md(r.y * zi))
    }

    pub fn neg(&self, q: &ModPoint) -> ModPoint {
        if q.is_identity() {
            return q.clone();
        }
        ModPoint::affine(q.x.clone(), self.md(-q.y.clone()))
    }

    pub fn double(&self, q: &ModPoint) -> ModPoint {
        if q.is_identity() || q.y == 0 {
            return ModPoint::identity();
        }
        let x2 = Integer::from(q.x.square_ref());
        let num = 3 * x2 + (2 * Integer::from(&self.a * &q.x)) + &self.b;
        let lambda = self.md(num * self.inv(&Integer::from(2 * &q.y)));
        self.finish(&lambda, &q.x, &q.x, &q.y)
    }

    pub fn add(&self, s: &ModPoint, t: &ModPoint) -> ModPoint {
        if s.is_identity() {
            return t.clone();
        }
        if t.is_identity() {
            return s.clone();
        }
        if s.x == t.x {
            if self.md(Integer::from(&s.y + &t.y)) == 0 {
                return ModPoint::identity();
            }
            return self.double(s);
        }
        let dx = self.md(Integer::from(&t.x - &s.x));
        let lambda = self.md(Integer::from(&t.y - &s.y) * self.inv(&dx));
        self.finish(&lambda, &s.x, &t.x, &s.y)
    }

    fn finish(&self, lambda: &Integer, x1: &Integer, x2: &Integer, y1: &Integer) -> ModPoint {
        let x3 = self.md(Integer::from(lambda.square_ref()) - &self.a - x1 - x2);
        let y3 = self.md((lambda * Integer::from(x1 - &x3)) - y1);
        ModPoint::affine(x3, y3)
    }

    pub fn mul(&self, k: &Integer, q: &ModPoint) -> ModPoint {
        let base = if *k < 0 { self.neg(q) } else { q.clone() };
        let k = k.clone().abs();
        let mut acc = ModPoint::identity();
        for bit in (0..k.significant_bits()).rev() {
            acc = self.double(&acc);
            if k.get_bit(bit) {
                acc = self.add(&acc, &base);
            }
        }
        acc
    }

    /// A positive multiple of the order of `q`, from baby-step giant-step over
    /// the Hasse interval.
    fn group_exponent_multiple(&self, q: &ModPoint) -> Result<Integer> {
        let p = &self.p;
        let (w, _) = isqrt(&Integer::from(p * 4u32))?;
        let w = w + 1u32;
        let lo = (Integer::from(p + 1u32) - &w).max(Integer::from(1));
        let hi = Integer::from(p + 1u32) + &w;
        let (m, _) = isqrt(&Integer::from(&hi - &lo))?;
        let m = (m + 1u32).to_u64().expect("baby-step count fits in u64");

        let mut baby: HashMap<ModPoint, u64> = HashMap::with_capacity(m as usize);
        let mut cur = ModPoint::identity();
        for j in 0..m {
            baby.entry(cur.clone()).or_insert(j);
            cur = self.add(&cur, q);
        }
        let giant = self.mul(&Integer::from(m), q);
        let mut r = self.mul(&lo, q);
        for i in 0..=m {
            if let Some(&j) = baby.get(&self.neg(&r)) {
                let n = (&lo + Integer::from(i) * m) + j;
                debug_assert!(self.mul(&n, q).is_identity());
                return Ok(n);
            }
            r = self.add(&r, &giant);
        }
        Err(Error::Verification(format!(
            "no multiple of the point order in the Hasse window mod {p}"
        )))
    }

    /// Exact order of `q` in E(F_p).
    pub fn order(&self, q: &ModPoint) -> Result<Integer> {
        if !self.contains(q) {
            return Err(Error::NotOnCurve);
        }
        if q.is_identity() {
            return Ok(Integer::from(1));
        }
        if self.p.significant_bits() > ORDER_MAX_BITS {
            return Err(Error::Precondition(format!(
                "order computation limited to primes below 2^{ORDER_MAX_BITS}"
            )));
        }
        let mut n = self.group_exponent_multiple(q)?;
        let f = factorize(&n, &FactorBudget::default())?;
        if !f.is_complete() {
            return Err(Error::Verification(format!(
                "could not factor group-order multiple {n}"
            )));
        }
        for (prime, _) in &f.factors {
            while n.is_divisible(prime) {
                let smaller = Integer::from(&n / prime);
                if !self.mul(&smaller, q).is_identity() {
                    break;
                }
                n = smaller;
            }
        }
        Ok(n)
    }

    /// |E(F_p)| by counting square values of the cubic.
    pub fn count_points(&self) -> Result<Integer> {
        let p = self
            .p
            .to_u64()
            .filter(|&p| p <= 10_000_000)
            .ok_or_else(|| Error::Precondition("brute-force count limited to p <= 10^7".into()))?;
        let mut total: i64 = 1;
        for x in 0..p {
            let v = self.cubic_at(&Integer::from(x));
            total += 1 + v.jacobi(&self.p) as i64;
        }
        Ok(Integer::from(total))
    }
}

/// Order of a reduced point; see [`ModCurve::order`].
pub fn order_mod_p(curve: &Curve, s: &ModPoint, p: &Integer) -> Result<Integer> {
    ModCurve::new(curve, p)?.order(s)
}

/// |E(F_p)| by enumerating x; p must be a prime of good reduction.
pub fn count_points_bruteforce(curve: &Curve, p: &Integer) -> Result<Integer> {
    if *p == 3 && !curve.disc().is_divisible_u(3) {
        // small primes excluded by ModCurve; counting is still well defined
        let mut total = 1i64;
        for x in 0..3 {
            let v = curve.cubic_at(&Integer::from(x)).rem_euc(p);
            total += 1 + v.jacobi(p) as i64;
        }
        return Ok(Integer::from(total));
    }
    ModCurve::new(curve, p)?.count_points()
}
