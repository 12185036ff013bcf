//! Eventually periodic description of |tau_k| prime by prime.
//!
//! Only primes with p^2 | disc can divide tau_k. For each odd such prime the
//! valuation ord_p(tau_k) is read off a finite table built from small
//! multiples of P; the power of 2 comes from the parity rules. Where neither
//! applies, the value is taken from the definition tau_k = 2 n_{k-1} / F_k.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::Integer;
use serde::Serialize;

use crate::arith::{factorize, is_power_of_two, valuation, FactorBudget};
use crate::curve::{is_singular_reduction, reduce_projective, Curve, QPoint};
use crate::error::{Error, Result};
use crate::fermat::{generate_direct, FermatState, GenerateOptions};

pub const DEFAULT_SEARCH_BOUND: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TauOptions {
    /// Largest multiple of P examined when looking for l and r.
    pub search_bound: u32,
    /// Digit budget for rows generated when the definition is needed.
    pub digit_budget: u64,
}

impl Default for TauOptions {
    fn default() -> Self {
        TauOptions {
            search_bound: DEFAULT_SEARCH_BOUND,
            digit_budget: crate::fermat::DEFAULT_DIGIT_BUDGET,
        }
    }
}

/// P, 2P, 3P, ... computed on demand.
struct Multiples<'a> {
    curve: &'a Curve,
    base: QPoint,
    pts: Vec<QPoint>,
}

impl<'a> Multiples<'a> {
    fn new(curve: &'a Curve, base: &QPoint) -> Self {
        Multiples {
            curve,
            base: base.clone(),
            pts: vec![base.clone()],
        }
    }

    /// `j * P` for `j >= 1`.
    fn get(&mut self, j: u32) -> &QPoint {
        while self.pts.len() < j as usize {
            let next = self.curve.add(self.pts.last().unwrap(), &self.base);
            self.pts.push(next);
        }
        &self.pts[j as usize - 1]
    }

    /// Smallest `j <= bound` with `d | e(jP)`.
    fn first_divisible(&mut self, d: &Integer, bound: u32) -> Option<u32> {
        (1..=bound).find(|&j| self.get(j).e_divisible_by(d))
    }
}

fn ord(n: &Integer, p: &Integer) -> u32 {
    valuation(n, p).expect("valuation of a nonzero integer")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeCase {
    /// l is a power of two: ord_p(tau_k) vanishes from k = log2(l) + 1 on.
    #[serde(rename = "power2")]
    PowerOfTwo,
    /// ord_p(tau_k) depends on 2^(k-1) mod r.
    Periodic,
    /// No l within the search bound.
    Exempt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeSchedule {
    #[serde(with = "crate::intser")]
    pub p: Integer,
    pub case: PrimeCase,
    /// Smallest l with p | e(lP), if found.
    pub l: Option<u32>,
    /// Smallest multiple r of l with p^s | e(rP) (periodic case).
    pub r: Option<u32>,
    /// floor(ord_p(disc) / 2), the largest possible ord_p(tau_k).
    pub s: u32,
    /// The exponent actually reached at r; below `s` only when the search bound
    /// cut the r search short.
    pub s_used: u32,
    /// Residue of 2^(k-1) mod r -> ord_p(tau_k).
    pub table: BTreeMap<u32, u32>,
    /// Residues whose table entry reached `s_used < s`, which only bounds the
    /// valuation from below.
    pub saturated: Vec<u32>,
    /// Explicit (k, ord_p(tau_k)) before the periodic or zero tail.
    pub head: Vec<(u32, u32)>,
    /// Power-of-two case: ord_p(tau_k) = 0 for every k >= this.
    pub zero_from: Option<u32>,
    /// Some indices need the definition for this prime.
    pub needs_definition: bool,
}

impl PrimeSchedule {
    /// ord_p(tau_k) when the schedule determines it.
    pub fn ord_at(&self, k: u32) -> Option<u32> {
        assert!(k >= 1);
        if let Some(&(_, v)) = self.head.iter().find(|(hk, _)| *hk == k) {
            return Some(v);
        }
        match self.case {
            PrimeCase::PowerOfTwo => self.zero_from.filter(|&z| k >= z).map(|_| 0),
            PrimeCase::Periodic => {
                let r = self.r?;
                let t = pow2_mod(k - 1, r);
                if self.saturated.contains(&t) {
                    None
                } else {
                    self.table.get(&t).copied()
                }
            }
            PrimeCase::Exempt => None,
        }
    }
}

fn pow2_mod(e: u32, r: u32) -> u32 {
    Integer::from(2)
        .pow_mod(&Integer::from(e), &Integer::from(r))
        .expect("positive modulus")
        .to_u32()
        .unwrap()
}

/// Schedule for one odd prime with p^2 | disc.
pub fn analyze_prime(curve: &Curve, p_point: &QPoint, p: &Integer, search_bound: u32) -> Result<PrimeSchedule> {
    let mut mult = Multiples::new(curve, p_point);
    analyze_with(curve, &mut mult, p, search_bound)
}

fn analyze_with(curve: &Curve, mult: &mut Multiples<'_>, p: &Integer, bound: u32) -> Result<PrimeSchedule> {
    if p.is_even() || *p < 3 {
        return Err(Error::BadPrime {
            p: p.clone(),
            reason: "the per-prime analysis needs an odd prime",
        });
    }
    let vd = valuation(curve.disc(), p).unwrap();
    if vd < 2 {
        return Err(Error::BadPrime {
            p: p.clone(),
            reason: "p^2 does not divide the discriminant",
        });
    }
    let s = vd / 2;
    let mut sched = PrimeSchedule {
        p: p.clone(),
        case: PrimeCase::Exempt,
        l: None,
        r: None,
        s,
        s_used: 0,
        table: BTreeMap::new(),
        saturated: Vec::new(),
        head: Vec::new(),
        zero_from: None,
        needs_definition: true,
    };
    let Some(l) = mult.first_divisible(p, bound) else {
        return Ok(sched);
    };
    sched.l = Some(l);

    if is_power_of_two(l as u64) {
        // p | e(2^d P) = e_d, so p | e_j and p does not divide n_j for j >= d
        let d = l.trailing_zeros();
        sched.case = PrimeCase::PowerOfTwo;
        sched.zero_from = Some(d + 1);
        sched.needs_definition = false;
        for k in 1..=d {
            let half = mult.get(1 << (k - 1)).clone();
            let full = mult.get(1 << k).clone();
            let (QPoint::Affine { n, e: e_half, .. }, QPoint::Affine { e: e_full, .. }) = (&half, &full) else {
                return Err(Error::TorsionPoint(1 << k));
            };
            let f = Integer::from(e_full / e_half);
            sched.head.push((k, ord(n, p) - ord(&f, p)));
        }
        return Ok(sched);
    }

    sched.case = PrimeCase::Periodic;
    let ps = Integer::from(p.pow(s));
    let mut best: Option<(u32, u32)> = None; // (multiple, ord_p(e))
    let mut j = l;
    while j <= bound {
        if mult.get(j).e_divisible_by(&ps) {
            best = Some((j, s));
            break;
        }
        let v = mult.get(j).e().map(|e| ord(e, p)).unwrap_or(u32::MAX);
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((j, v.min(s)));
        }
        j += l;
    }
    let (r, s_used) = best.expect("l itself is a candidate");
    sched.r = Some(r);
    sched.s_used = s_used;

    // orbit of 2^(k-1) mod r; p never divides e(2^(k-1) P) here, so
    // ord_p(tau_k) = ord_p(n(2^(k-1) P)), capped at s
    let mut t = 1 % r;
    while let std::collections::btree_map::Entry::Vacant(slot) = sched.table.entry(t) {
        let QPoint::Affine { n, .. } = mult.get(t) else {
            return Err(Error::Verification("multiple of P in the table is the identity".into()));
        };
        let v = ord(n, p).min(s_used);
        slot.insert(v);
        if v == s_used && s_used < s {
            sched.saturated.push(t);
        }
        t = (2 * t) % r;
    }
    sched.needs_definition = !sched.saturated.is_empty();
    Ok(sched)
}

/// How ord_2(tau_k) is obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoAdicRule {
    /// Smallest l with e(lP) even, if found within the bound.
    pub l: Option<u32>,
    /// log2(l) when l is a power of two: e_k is even exactly for k >= d.
    pub d: Option<u32>,
    /// floor(ord_2(disc/4) / 2).
    pub s: u32,
}

impl TwoAdicRule {
    fn e_even(&self, k: u32) -> Option<bool> {
        match (self.l, self.d) {
            (Some(_), Some(d)) => Some(k >= d),
            (Some(_), None) => Some(false),
            (None, _) => None,
        }
    }

    /// ord_2(tau_k) when the parity theorems pin it down.
    pub fn ord_at(&self, k: u32) -> Option<u32> {
        let prev_even = self.e_even(k - 1)?;
        let cur_even = self.e_even(k)?;
        if prev_even {
            // tau_k is odd once e_{k-1} is even
            Some(0)
        } else if !cur_even {
            // tau_k is even and tau_k^2 | disc/4
            (self.s == 1).then_some(1)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TauSchedule {
    /// Factorization of |disc|.
    pub disc_primes: Vec<(String, u32)>,
    pub primes: Vec<PrimeSchedule>,
    pub two_adic: TwoAdicRule,
}

/// Factor the discriminant and analyse every prime that could divide tau_k.
pub fn build_schedule(curve: &Curve, p_point: &QPoint, opts: &TauOptions) -> Result<TauSchedule> {
    let disc = Integer::from(curve.disc().abs_ref());
    let fact = factorize(&disc, &FactorBudget::default())?;
    if !fact.is_complete() {
        return Err(Error::Verification(format!("could not factor the discriminant {disc}")));
    }
    let mut mult = Multiples::new(curve, p_point);
    let mut primes = Vec::new();
    for (q, e) in &fact.factors {
        if *q != 2 && *e >= 2 {
            primes.push(analyze_with(curve, &mut mult, q, opts.search_bound)?);
        }
    }
    let two = Integer::from(2);
    let l2 = mult.first_divisible(&two, opts.search_bound);
    let d2 = l2.filter(|&l| is_power_of_two(l as u64)).map(u32::trailing_zeros);
    let quarter = Integer::from(curve.disc() / 4u32);
    let s2 = valuation(&quarter, &two).unwrap() / 2;
    Ok(TauSchedule {
        disc_primes: fact.factors.iter().map(|(q, e)| (q.to_string(), *e)).collect(),
        primes,
        two_adic: TwoAdicRule { l: l2, d: d2, s: s2 },
    })
}

/// Where each |tau_k| came from.
#[derive(Debug, Clone, Serialize)]
pub struct TauRow {
    pub k: u32,
    #[serde(with = "crate::intser")]
    pub value: Integer,
    /// Primes (2 included) whose exponent came from the definition.
    pub from_definition: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TauComputation {
    pub schedule: TauSchedule,
    pub rows: Vec<TauRow>,
}

impl TauComputation {
    pub fn values(&self) -> Vec<Integer> {
        self.rows.iter().map(|r| r.value.clone()).collect()
    }

    /// Every exponent came from the schedule alone.
    pub fn fully_scheduled(&self) -> bool {
        self.rows.iter().all(|r| r.from_definition.is_empty())
    }
}

/// |tau_k| for k = 1..=k_max from the schedule, falling back to the
/// definition for indices the schedule leaves open.
pub fn tau_for_all_k(curve: &Curve, p_point: &QPoint, k_max: u32, opts: &TauOptions) -> Result<TauComputation> {
    let schedule = build_schedule(curve, p_point, opts)?;
    let mut states: Option<Vec<FermatState>> = None;
    let mut definition = |k: u32| -> Result<Integer> {
        if states.is_none() {
            let g = GenerateOptions {
                digit_budget: opts.digit_budget,
                ..Default::default()
            };
            states = Some(generate_direct(curve, p_point, k_max, &g)?);
        }
        Ok(states.as_ref().unwrap()[k as usize]
            .tau
            .clone()
            .expect("tau defined for k >= 1"))
    };

    let mut rows = Vec::new();
    for k in 1..=k_max {
        let mut value = Integer::from(1);
        let mut from_definition = Vec::new();
        let two = Integer::from(2);
        let v2 = match schedule.two_adic.ord_at(k) {
            Some(v) => v,
            None => {
                from_definition.push("2".to_string());
                ord(&definition(k)?, &two)
            }
        };
        value <<= v2;
        for ps in &schedule.primes {
            let v = match ps.ord_at(k) {
                Some(v) => v,
                None => {
                    from_definition.push(ps.p.to_string());
                    ord(&definition(k)?, &ps.p)
                }
            };
            value *= Integer::from((&ps.p).pow(v));
        }
        rows.push(TauRow {
            k,
            value,
            from_definition,
        });
    }
    Ok(TauComputation { schedule, rows })
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularRow {
    pub k: u32,
    /// 2^(k-1) P reduces to a singular point.
    pub previous_singular: bool,
    /// p | n_{k-1}.
    pub previous_y_zero: bool,
    /// 2^k P reduces to a singular point.
    pub current_singular: bool,
    pub p_divides_tau: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularAudit {
    #[serde(with = "crate::intser")]
    pub p: Integer,
    pub rows: Vec<SingularRow>,
    pub failures: Vec<String>,
}

impl SingularAudit {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For each generated k: p | tau_k forces 2^(k-1) P onto a singular point with
/// Y = 0, and singular reduction of both 2^(k-1) P and 2^k P forces p | tau_k.
pub fn singular_reduction_audit(curve: &Curve, states: &[FermatState], p: &Integer) -> Result<SingularAudit> {
    if p.is_even() || *p < 3 {
        return Err(Error::BadPrime {
            p: p.clone(),
            reason: "singular reduction audit needs an odd prime",
        });
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for w in states.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        let tau = cur
            .tau
            .as_ref()
            .ok_or_else(|| Error::Precondition("row without tau".into()))?;
        let row = SingularRow {
            k: cur.k,
            previous_singular: is_singular_reduction(curve, &reduce_projective(&prev.point(), p), p),
            previous_y_zero: prev.n.is_divisible(p),
            current_singular: is_singular_reduction(curve, &reduce_projective(&cur.point(), p), p),
            p_divides_tau: tau.is_divisible(p),
        };
        if row.p_divides_tau && !(row.previous_singular && row.previous_y_zero) {
            failures.push(format!(
                "k = {}: p | tau_k but 2^(k-1)P is not singular with Y = 0",
                cur.k
            ));
        }
        if row.previous_singular && row.current_singular && !row.p_divides_tau {
            failures.push(format!(
                "k = {}: both reductions singular but p does not divide tau_k",
                cur.k
            ));
        }
        rows.push(row);
    }
    Ok(SingularAudit {
        p: p.clone(),
        rows,
        failures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TranslationReport {
    #[serde(with = "crate::intser")]
    pub p: Integer,
    pub s: u32,
    pub sum: QPoint,
    pub x_congruent: bool,
    pub y_congruent: bool,
}

impl TranslationReport {
    pub fn passed(&self) -> bool {
        self.x_congruent && self.y_congruent
    }
}

/// `m / e^k` reduced mod `modulus`, for `e` prime to it.
fn p_integral(num: &Integer, e: &Integer, k: u32, modulus: &Integer) -> Integer {
    let den = Integer::from(e.pow(k));
    let inv = den.invert(modulus).expect("denominator is a unit");
    ((num * inv) % modulus + modulus) % modulus
}

/// Compare X(Q + R), Y(Q + R) with X(Q), Y(Q) modulo p^s, where p does not
/// divide e(Q) and p^s exactly divides e(R).
pub fn translation_periodicity_check(
    curve: &Curve,
    q: &QPoint,
    r: &QPoint,
    p: &Integer,
    s: u32,
) -> Result<TranslationReport> {
    let (QPoint::Affine { m: mq, n: nq, e: eq }, QPoint::Affine { e: er, .. }) = (q, r) else {
        return Err(Error::Precondition("Q and R must be affine points".into()));
    };
    if eq.is_divisible(p) {
        return Err(Error::Precondition("p divides the denominator of Q".into()));
    }
    if s == 0 || valuation(er, p) != Some(s) {
        return Err(Error::Precondition(format!("p^{s} does not exactly divide e(R)")));
    }
    let sum = curve.add(q, r);
    let QPoint::Affine { m: ms, n: ns, e: es } = &sum else {
        return Err(Error::Verification("Q + R is the identity".into()));
    };
    let modulus = Integer::from(p.pow(s));
    if es.is_divisible(p) {
        return Ok(TranslationReport {
            p: p.clone(),
            s,
            sum,
            x_congruent: false,
            y_congruent: false,
        });
    }
    let x_congruent = p_integral(ms, es, 2, &modulus) == p_integral(mq, eq, 2, &modulus);
    let y_congruent = p_integral(ns, es, 3, &modulus) == p_integral(nq, eq, 3, &modulus);
    Ok(TranslationReport {
        p: p.clone(),
        s,
        sum,
        x_congruent,
        y_congruent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cm_curve_has_only_the_two_adic_part() {
        let c = Curve::new(0, -2, 0).unwrap();
        let p = c.point(2, 2, 1).unwrap();
        let t = tau_for_all_k(&c, &p, 4, &TauOptions::default()).unwrap();
        assert!(t.schedule.primes.is_empty());
        assert_eq!(t.values(), [2, 1, 1, 1]);
        // k = 1 is the exceptional parity case
        assert_eq!(t.rows[0].from_definition, ["2"]);
        assert!(t.rows[1..].iter().all(|r| r.from_definition.is_empty()));
    }

    #[test]
    fn prime_dividing_e0_is_power_of_two_case() {
        // y^2 = x^3 - 25x, P = (-4, 6): 5 | disc, and the schedule at 5 must
        // agree with the definition whatever case it lands in
        let c = Curve::new(0, -25, 0).unwrap();
        let p = c.point(-4, 6, 1).unwrap();
        let sched = analyze_prime(&c, &p, &Integer::from(5), 200).unwrap();
        let states = generate_direct(&c, &p, 6, &GenerateOptions::default()).unwrap();
        for k in 1..=6u32 {
            if let Some(v) = sched.ord_at(k) {
                let tau = states[k as usize].tau.as_ref().unwrap();
                assert_eq!(v, valuation(tau, &Integer::from(5)).unwrap(), "k = {k}");
            }
        }
    }

    #[test]
    fn schedule_at_89_on_the_199_curve() {
        let c = Curve::new(-199, -1, 0).unwrap();
        let p = c.point(2809, 89623, 3).unwrap();
        let sched = analyze_prime(&c, &p, &Integer::from(89), 200).unwrap();
        assert_eq!(sched.s, 1);
        assert_ne!(sched.case, PrimeCase::Exempt);
        let states = generate_direct(&c, &p, 5, &GenerateOptions::default()).unwrap();
        for k in 1..=5u32 {
            let tau = states[k as usize].tau.as_ref().unwrap();
            assert_eq!(sched.ord_at(k), valuation(tau, &Integer::from(89)), "k = {k}");
        }
        assert!(analyze_prime(&c, &p, &Integer::from(5), 200).is_err());
        assert!(analyze_prime(&c, &p, &Integer::from(2), 200).is_err());
    }

    #[test]
    fn battery_matches_the_definition() {
        let battery: [((i64, i64, i64), (i64, i64, i64)); 7] = [
            ((0, -2, 0), (2, 2, 1)),
            ((-199, -1, 0), (2809, 89623, 3)),
            ((0, 0, 17), (-2, 3, 1)),
            ((0, 0, -2), (3, 5, 1)),
            ((0, -25, 0), (-4, 6, 1)),
            ((0, -36, 0), (-3, 9, 1)),
            ((0, -16, 16), (0, 4, 1)),
        ];
        for ((a, b, cc), (m, n, e)) in battery {
            let c = Curve::new(a, b, cc).unwrap();
            let p = c.point(m, n, e).unwrap();
            let t = tau_for_all_k(&c, &p, 6, &TauOptions::default()).unwrap();
            let states = generate_direct(&c, &p, 6, &GenerateOptions::default()).unwrap();
            assert_eq!(
                t.values(),
                crate::fermat::tau_magnitudes(&states),
                "curve ({a}, {b}, {cc})"
            );
        }
    }

    #[test]
    fn translation_on_the_cm_curve() {
        let c = Curve::new(0, -2, 0).unwrap();
        let p = c.point(2, 2, 1).unwrap();
        let four = c.mul(4, &p);
        assert_eq!(four.e().unwrap().to_u32(), Some(84));
        let rep = translation_periodicity_check(&c, &p, &four, &Integer::from(3), 1).unwrap();
        assert!(rep.passed());
        assert!(translation_periodicity_check(&c, &p, &four, &Integer::from(3), 2).is_err());
        assert!(translation_periodicity_check(&c, &four, &p, &Integer::from(3), 1).is_err());
    }
}
