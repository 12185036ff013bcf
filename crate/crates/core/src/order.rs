//! Order of P modulo N read two ways: from divisibility of the denominators
//! e_k, and from arithmetic on the reduced curve.

use rug::Integer;
use serde::Serialize;

use crate::arith::{factorize, is_probable_prime, FactorBudget};
use crate::curve::{Curve, ModCurve, QPoint};
use crate::error::{Error, Result};
use crate::fermat::FermatState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderClaim {
    /// P has order 2^k modulo N.
    TwoPower { k: u32 },
    /// The order is known and is not a power of two.
    NotTwoPower,
    /// N divides none of e_0..=e_{checked}.
    NoneWithinRange { checked: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    EkDivisibility,
    PrimeLadder,
    Crt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderCertificate {
    #[serde(with = "crate::intser")]
    pub modulus: Integer,
    pub claim: OrderClaim,
    /// Exact order where the method produces one.
    #[serde(with = "crate::intser::opt")]
    pub order: Option<Integer>,
    /// N | e_k for the claimed k.
    pub divides_e_k: Option<bool>,
    /// N does not divide e_{k-1} (vacuous for k = 0).
    pub not_divides_e_prev: Option<bool>,
    pub method: Method,
}

impl OrderCertificate {
    /// The evidence flags support the claim.
    pub fn consistent(&self) -> bool {
        match self.claim {
            OrderClaim::TwoPower { k } => {
                let order_ok = self.order.as_ref().is_none_or(|o| *o == Integer::from(1) << k);
                order_ok && self.divides_e_k != Some(false) && self.not_divides_e_prev != Some(false)
            }
            OrderClaim::NotTwoPower => self.order.as_ref().is_none_or(|o| !o.is_power_of_two()),
            OrderClaim::NoneWithinRange { .. } => self.divides_e_k.is_none(),
        }
    }
}

fn check_modulus(curve: &Curve, n: &Integer) -> Result<()> {
    if *n < 1 {
        return Err(Error::BadModulus(n.clone()));
    }
    let six_disc = Integer::from(curve.disc() * 6u32);
    if Integer::from(n.gcd_ref(&six_disc)) != 1 {
        return Err(Error::BadPrime {
            p: n.clone(),
            reason: "modulus shares a factor with 6 * disc",
        });
    }
    Ok(())
}

/// Smallest k with N | e_k among the given rows.
pub fn order_by_divisibility(curve: &Curve, states: &[FermatState], n: &Integer) -> Result<OrderCertificate> {
    check_modulus(curve, n)?;
    let found = states.iter().find(|s| s.e.is_divisible(n));
    let (claim, divides, not_prev) = match found {
        Some(s) => {
            let prev_ok = s.k == 0 || !states[s.k as usize - 1].e.is_divisible(n);
            (OrderClaim::TwoPower { k: s.k }, Some(true), Some(prev_ok))
        }
        None => (
            OrderClaim::NoneWithinRange {
                checked: states.last().map_or(0, |s| s.k),
            },
            None,
            None,
        ),
    };
    Ok(OrderCertificate {
        modulus: n.clone(),
        claim,
        order: None,
        divides_e_k: divides,
        not_divides_e_prev: not_prev,
        method: Method::EkDivisibility,
    })
}

fn claim_from_order(order: &Integer) -> OrderClaim {
    if order.is_power_of_two() {
        OrderClaim::TwoPower {
            k: order.significant_bits() - 1,
        }
    } else {
        OrderClaim::NotTwoPower
    }
}

/// Exact order of P modulo a prime of good reduction with p > 3.
pub fn order_by_ladder(curve: &Curve, p_point: &QPoint, p: &Integer) -> Result<OrderCertificate> {
    check_modulus(curve, p)?;
    let mc = ModCurve::new(curve, p)?;
    let order = mc.order(&mc.reduce(p_point))?;
    Ok(OrderCertificate {
        modulus: p.clone(),
        claim: claim_from_order(&order),
        order: Some(order),
        divides_e_k: None,
        not_divides_e_prev: None,
        method: Method::PrimeLadder,
    })
}

/// Order modulo a squarefree N as the lcm of the prime orders.
pub fn order_by_crt(curve: &Curve, p_point: &QPoint, n: &Integer) -> Result<OrderCertificate> {
    check_modulus(curve, n)?;
    let fact = factorize(n, &FactorBudget::default())?;
    if !fact.is_complete() {
        return Err(Error::Verification(format!("could not factor modulus {n}")));
    }
    if fact.factors.iter().any(|(_, e)| *e > 1) {
        return Err(Error::Precondition("CRT path needs a squarefree modulus".into()));
    }
    let mut order = Integer::from(1);
    for (q, _) in &fact.factors {
        let c = order_by_ladder(curve, p_point, q)?;
        order.lcm_mut(c.order.as_ref().unwrap());
    }
    Ok(OrderCertificate {
        modulus: n.clone(),
        claim: claim_from_order(&order),
        order: Some(order),
        divides_e_k: None,
        not_divides_e_prev: None,
        method: Method::Crt,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossRow {
    #[serde(with = "crate::intser")]
    pub p: Integer,
    pub divisibility: OrderCertificate,
    pub ladder: OrderCertificate,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub rows: Vec<CrossRow>,
    pub failures: Vec<String>,
}

impl CrossValidation {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Whether two certificates say the same thing, given how far the rows go.
pub fn certificates_agree(divisibility: &OrderCertificate, ladder: &OrderCertificate) -> bool {
    match (divisibility.claim, ladder.claim) {
        (OrderClaim::TwoPower { k: a }, OrderClaim::TwoPower { k: b }) => a == b,
        (OrderClaim::NoneWithinRange { .. }, OrderClaim::NotTwoPower) => true,
        (OrderClaim::NoneWithinRange { checked }, OrderClaim::TwoPower { k }) => k > checked,
        _ => false,
    }
}

/// Compare both paths for each prime.
pub fn cross_validate(curve: &Curve, states: &[FermatState], primes: &[Integer]) -> Result<CrossValidation> {
    let base = states
        .first()
        .ok_or_else(|| Error::Precondition("no rows to validate against".into()))?
        .point();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for p in primes {
        if !is_probable_prime(p) {
            return Err(Error::BadPrime {
                p: p.clone(),
                reason: "not prime",
            });
        }
        let divisibility = order_by_divisibility(curve, states, p)?;
        let ladder = order_by_ladder(curve, &base, p)?;
        let agree = certificates_agree(&divisibility, &ladder) && divisibility.consistent() && ladder.consistent();
        if !agree {
            failures.push(format!("p = {p}: {:?} vs {:?}", divisibility.claim, ladder.claim));
        }
        rows.push(CrossRow {
            p: p.clone(),
            divisibility,
            ladder,
            agree,
        });
    }
    Ok(CrossValidation { rows, failures })
}
