//! The CM curve y^2 = x^3 - 2x with P = (2, 2): Frobenius traces, the
//! congruences satisfied by prime factors of F_n, and where Fermat and
//! Mersenne primes enter the sequence.

use rug::ops::RemRounding;
use rug::Integer;
use serde::Serialize;

use crate::arith::{factorize, is_probable_prime, two_square, FactorBudget, Factorization};
use crate::curve::{Curve, ModCurve, QPoint};
use crate::error::{Error, Result};
use crate::fermat::{generate_direct, FermatState, GenerateOptions};
use crate::order::{order_by_ladder, OrderClaim};

pub fn cm_curve() -> Curve {
    Curve::new(0, -2, 0).expect("nonsingular")
}

pub fn cm_point() -> QPoint {
    QPoint::from_ints(2, 2, 1).expect("valid point")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceBranch {
    /// p = 3 mod 4, a_p = 0.
    ThreeModFour,
    /// 2^((p-1)/4) = 1.
    MinusA,
    /// 2^((p-1)/4) = -1.
    PlusA,
    /// 2^((p-1)/4) = -a/b.
    MinusB,
    /// 2^((p-1)/4) = a/b.
    PlusB,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    #[serde(with = "crate::intser")]
    pub p: Integer,
    #[serde(with = "crate::intser")]
    pub a_p: Integer,
    #[serde(with = "crate::intser")]
    pub group_order: Integer,
    pub branch: TraceBranch,
}

/// Trace of Frobenius of y^2 = x^3 - 2x at an odd prime, from p = a^2 + b^2
/// with a = -1 mod 4 and the quartic character of 2.
pub fn trace(p: &Integer) -> Result<TraceRecord> {
    if *p <= 2 || !is_probable_prime(p) {
        return Err(Error::BadPrime {
            p: p.clone(),
            reason: "trace needs an odd prime",
        });
    }
    let record = |a_p: Integer, branch| TraceRecord {
        p: p.clone(),
        group_order: Integer::from(p + 1u32) - &a_p,
        a_p,
        branch,
    };
    if p.mod_u(4) == 3 {
        return Ok(record(Integer::new(), TraceBranch::ThreeModFour));
    }
    let (a, b) = two_square(p)?;
    let e = Integer::from(p - 1u32) / 4u32;
    let q = Integer::from(2).pow_mod(&e, p).expect("positive modulus");
    let b_inv = b.clone().invert(p).expect("0 < b < p");
    let a_over_b = Integer::from(&a * &b_inv).rem_euc(p);
    let minus_a_over_b = Integer::from(p - &a_over_b).rem_euc(p);
    let minus_one = Integer::from(p - 1u32);
    let legendre = Integer::from(2).legendre(p);
    let (v, branch) = if q == 1 {
        (Integer::from(-&a), TraceBranch::MinusA)
    } else if q == minus_one {
        (a.clone(), TraceBranch::PlusA)
    } else if q == minus_a_over_b {
        (Integer::from(-&b), TraceBranch::MinusB)
    } else if q == a_over_b {
        (b.clone(), TraceBranch::PlusB)
    } else {
        return Err(Error::Verification(format!("2^((p-1)/4) mod {p} matches no branch")));
    };
    Ok(record(v * (2 * legendre), branch))
}

/// One factored row F_n.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub n: u32,
    #[serde(with = "crate::intser")]
    pub f: Integer,
    pub factorization: Factorization,
}

/// Factor F_0..=F_k_max for P = (2, 2).
pub fn reproduce_table(k_max: u32, budget: &FactorBudget) -> Result<Vec<TableRow>> {
    let states = generate_direct(&cm_curve(), &cm_point(), k_max, &GenerateOptions::default())?;
    table_from_states(&states, budget)
}

pub fn table_from_states(states: &[FermatState], budget: &FactorBudget) -> Result<Vec<TableRow>> {
    states
        .iter()
        .map(|s| {
            let factorization = if s.f == 1 {
                Factorization {
                    value: Integer::from(1),
                    factors: Vec::new(),
                    unfactored: Vec::new(),
                }
            } else {
                factorize(&s.f, budget)?
            };
            Ok(TableRow {
                n: s.k,
                f: s.f.clone(),
                factorization,
            })
        })
        .collect()
}

/// Published factorizations of F_0..=F_5 at P = (2, 2). Row 5 is printed with
/// an ellipsis: its six smallest primes and its largest.
pub const REFERENCE_TABLE: [&[&str]; 6] = [
    &[],
    &["2"],
    &["2", "3", "7"],
    &["2", "31", "113", "257"],
    &["2", "2113", "2593", "46271", "101281", "623013889"],
    &[
        "2",
        "127",
        "65537",
        "33303551",
        "70639871",
        "364024274689",
        "676209479362440577",
    ],
];

/// Rows of [`REFERENCE_TABLE`] given in full.
pub const REFERENCE_COMPLETE_ROWS: u32 = 5;

#[derive(Debug, Clone, Serialize)]
pub struct RowComparison {
    pub n: u32,
    pub expected: Vec<String>,
    pub found: Vec<String>,
    pub matches: bool,
}

/// Compare factored rows with the reference. Full rows must agree prime for
/// prime (each to the first power); the truncated row must have the listed
/// primes as its smallest ones and its largest.
pub fn compare_with_reference(rows: &[TableRow]) -> Vec<RowComparison> {
    rows.iter()
        .filter(|r| (r.n as usize) < REFERENCE_TABLE.len())
        .map(|r| {
            let expected: Vec<String> = REFERENCE_TABLE[r.n as usize].iter().map(|s| s.to_string()).collect();
            let found: Vec<String> = r.factorization.primes().map(Integer::to_string).collect();
            let squarefree = r.factorization.factors.iter().all(|(_, e)| *e == 1);
            let complete = r.factorization.is_complete() && squarefree;
            let matches = if r.n < REFERENCE_COMPLETE_ROWS {
                complete && found == expected
            } else {
                let head = expected.len() - 1;
                complete
                    && found.len() > expected.len()
                    && found[..head] == expected[..head]
                    && found.last() == expected.last()
            };
            RowComparison {
                n: r.n,
                expected,
                found,
                matches,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorClass {
    #[serde(with = "crate::intser")]
    pub p: Integer,
    pub mod4: u32,
    /// p mod 2^n, as a residue in [0, 2^n).
    #[serde(with = "crate::intser")]
    pub mod_2n: Integer,
    /// p = 1 mod 2^n when p = 1 mod 4, p = -1 mod 2^n otherwise.
    pub congruence_holds: bool,
    /// For p = 1 mod 4 and n >= 3: p = 1 mod max(2^floor(n/2), 8).
    pub weak_congruence_holds: Option<bool>,
    /// Order of P mod p equals 2^n.
    pub order_matches: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisorAudit {
    pub n: u32,
    pub factors: Vec<FactorClass>,
    #[serde(with = "crate::intser::vec")]
    pub unaudited: Vec<Integer>,
}

impl DivisorAudit {
    pub fn passed(&self) -> bool {
        self.factors
            .iter()
            .all(|f| f.congruence_holds && f.weak_congruence_holds != Some(false) && f.order_matches != Some(false))
    }
}

/// Classify every odd prime factor of each row by its residue mod 4 and 2^n.
/// With `check_orders`, also compare the order of P mod p with 2^n.
pub fn congruence_audit(rows: &[TableRow], check_orders: bool) -> Result<Vec<DivisorAudit>> {
    let (curve, point) = (cm_curve(), cm_point());
    let mut out = Vec::new();
    for row in rows {
        let modulus = Integer::from(1) << row.n;
        let mut factors = Vec::new();
        for p in row.factorization.primes().filter(|p| **p != 2) {
            let mod4 = p.mod_u(4);
            let mod_2n = Integer::from(p.rem_euc(&modulus));
            let target = if mod4 == 1 {
                Integer::from(1).rem_euc(&modulus)
            } else {
                Integer::from(&modulus - 1u32).rem_euc(&modulus)
            };
            let weak = (mod4 == 1 && row.n >= 3).then(|| {
                let w = Integer::from(1) << (row.n / 2).max(3);
                p.clone().rem_euc(&w) == 1
            });
            let order_matches = if check_orders && *p > 3 {
                let c = order_by_ladder(&curve, &point, p)?;
                Some(c.claim == OrderClaim::TwoPower { k: row.n })
            } else {
                None
            };
            factors.push(FactorClass {
                p: p.clone(),
                mod4,
                congruence_holds: mod_2n == target,
                mod_2n,
                weak_congruence_holds: weak,
                order_matches,
            });
        }
        out.push(DivisorAudit {
            n: row.n,
            factors,
            unaudited: row.factorization.unfactored.clone(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecialPrime {
    /// q = 2^(2^k) + 1.
    Fermat { k: u32 },
    /// q = 2^p - 1.
    Mersenne { p: u32 },
}

impl SpecialPrime {
    pub fn classify(q: &Integer) -> Option<Self> {
        if !is_probable_prime(q) {
            return None;
        }
        let minus = Integer::from(q - 1u32);
        if minus.is_power_of_two() {
            let e = minus.significant_bits() - 1;
            if e.is_power_of_two() {
                return Some(SpecialPrime::Fermat { k: e.trailing_zeros() });
            }
        }
        let plus = Integer::from(q + 1u32);
        if plus.is_power_of_two() {
            return Some(SpecialPrime::Mersenne {
                p: plus.significant_bits() - 1,
            });
        }
        None
    }

    /// Largest index n allowed for q | F_n.
    pub fn bound(&self) -> u32 {
        match *self {
            SpecialPrime::Fermat { k } => (1u32 << (k - 1)) - 1,
            SpecialPrime::Mersenne { p } => p - 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecialLocation {
    #[serde(with = "crate::intser")]
    pub q: Integer,
    pub shape: SpecialPrime,
    /// q | F_n.
    pub n: u32,
    pub bound: u32,
    pub bound_satisfied: bool,
}

/// Index n with q | F_n for a Fermat prime other than 5 and 17, or a
/// Mersenne prime >= 31, and whether n respects the stated bound.
pub fn special_prime_locator(q: &Integer) -> Result<SpecialLocation> {
    let shape = SpecialPrime::classify(q).ok_or_else(|| Error::BadPrime {
        p: q.clone(),
        reason: "not a Fermat or Mersenne prime",
    })?;
    match shape {
        SpecialPrime::Fermat { k } if k <= 2 => {
            return Err(Error::BadPrime {
                p: q.clone(),
                reason: "Fermat primes 3, 5, 17 are outside the theorem",
            })
        }
        SpecialPrime::Mersenne { .. } if *q < 31 => {
            return Err(Error::BadPrime {
                p: q.clone(),
                reason: "Mersenne primes below 31 are outside the theorem",
            })
        }
        _ => {}
    }
    let cert = order_by_ladder(&cm_curve(), &cm_point(), q)?;
    let OrderClaim::TwoPower { k: n } = cert.claim else {
        return Err(Error::Verification(format!("order of P mod {q} is not a power of two")));
    };
    let bound = shape.bound();
    Ok(SpecialLocation {
        q: q.clone(),
        shape,
        n,
        bound,
        bound_satisfied: n <= bound,
    })
}

/// Point count of the CM curve mod p by enumerating x.
pub fn brute_force_order(p: &Integer) -> Result<Integer> {
    crate::curve::count_points_bruteforce(&cm_curve(), p)
}

/// E(F_p) for the CM curve; p >= 5.
pub fn reduced_curve(p: &Integer) -> Result<ModCurve> {
    ModCurve::new(&cm_curve(), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rows_through_four() {
        let states = crate::generate_direct(&cm_curve(), &cm_point(), 4, &Default::default()).unwrap();
        let mut rows = table_from_states(&states, &FactorBudget::default()).unwrap();
        assert!(compare_with_reference(&rows).iter().all(|c| c.matches));
        rows[3].factorization = crate::factorize(&Integer::from(2 * 31 * 113), &FactorBudget::default()).unwrap();
        let cmp = compare_with_reference(&rows);
        assert!(!cmp[3].matches && cmp[2].matches);
    }

    #[test]
    fn trace_examples() {
        let t = trace(&Integer::from(113)).unwrap();
        assert_eq!((t.a_p.to_i32(), t.group_order.to_i32()), (Some(-14), Some(128)));
        assert_eq!(t.branch, TraceBranch::MinusA);
        let t = trace(&Integer::from(7)).unwrap();
        assert_eq!((t.a_p.to_i32(), t.group_order.to_i32()), (Some(0), Some(8)));
        let t = trace(&Integer::from(5)).unwrap();
        assert_eq!(t.group_order, brute_force_order(&Integer::from(5)).unwrap());
        assert!(trace(&Integer::from(2)).is_err());
        assert!(trace(&Integer::from(9)).is_err());
    }

    #[test]
    fn special_prime_shapes() {
        let c = |q: u64| SpecialPrime::classify(&Integer::from(q));
        assert_eq!(c(257), Some(SpecialPrime::Fermat { k: 3 }));
        assert_eq!(c(65537), Some(SpecialPrime::Fermat { k: 4 }));
        assert_eq!(c(31), Some(SpecialPrime::Mersenne { p: 5 }));
        assert_eq!(c(127), Some(SpecialPrime::Mersenne { p: 7 }));
        assert_eq!(c(3), Some(SpecialPrime::Fermat { k: 0 }));
        assert_eq!(c(113), None);
        assert!(special_prime_locator(&Integer::from(17)).is_err());
        assert!(special_prime_locator(&Integer::from(7)).is_err());
    }

    #[test]
    fn locations() {
        let at = |q: u64| {
            let l = special_prime_locator(&Integer::from(q)).unwrap();
            (l.n, l.bound, l.bound_satisfied)
        };
        assert_eq!(at(257), (3, 3, true));
        assert_eq!(at(65537), (5, 7, true));
        assert_eq!(at(31), (3, 2, false));
        assert_eq!(at(127), (5, 4, false));
    }

    #[test]
    fn small_rows_audit() {
        let rows = reproduce_table(4, &FactorBudget::default()).unwrap();
        let audits = congruence_audit(&rows, true).unwrap();
        assert!(audits.iter().all(DivisorAudit::passed));
        let row3: Vec<u64> = audits[3].factors.iter().map(|f| f.p.to_u64().unwrap()).collect();
        assert_eq!(row3, [31, 113, 257]);
        assert_eq!(audits[2].factors[0].order_matches, None);
        assert_eq!(audits[4].factors[2].mod_2n, 15);
    }
}
