//! Elliptic Fermat sequences: F_0 = e_0 and F_k = e_k / e_{k-1}, where e_k is
//! the square root of the denominator of X(2^k P).

mod cache;
mod checks;

pub use cache::{generate_cached, load_cache, write_cache, SequenceCache};
pub use checks::{
    coprimality_check, growth_report, parity_audit, verify_tau_invariants, CoprimalityReport, GrowthReport, ParityCase,
    ParityReport, ParityRow, Regime, TauInvariantReport,
};

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::decimal_digits_estimate;
use crate::curve::{Curve, QPoint};
use crate::error::{Error, Result};

/// Multiples checked before a point is accepted as non-torsion. Mazur's
/// theorem bounds the order of a rational torsion point by 12.
pub const TORSION_BOUND: u32 = 12;

pub const DEFAULT_DIGIT_BUDGET: u64 = 1_000_000;

/// One row of the sequence: 2^k P = (m/e^2, n/e^3), F = e_k / e_{k-1} and
/// tau = 2 n_{k-1} / F (absent at k = 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermatState {
    pub k: u32,
    #[serde(with = "crate::intser")]
    pub m: Integer,
    #[serde(with = "crate::intser")]
    pub n: Integer,
    #[serde(with = "crate::intser")]
    pub e: Integer,
    #[serde(rename = "F", with = "crate::intser")]
    pub f: Integer,
    #[serde(with = "crate::intser::opt")]
    pub tau: Option<Integer>,
}

impl FermatState {
    pub fn point(&self) -> QPoint {
        QPoint::Affine {
            m: self.m.clone(),
            n: self.n.clone(),
            e: self.e.clone(),
        }
    }

    fn initial(p: &QPoint) -> Result<Self> {
        match p {
            QPoint::Identity => Err(Error::InvalidPoint("base point is the identity".into())),
            QPoint::Affine { m, n, e } => Ok(FermatState {
                k: 0,
                m: m.clone(),
                n: n.clone(),
                e: e.clone(),
                f: e.clone(),
                tau: None,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerateOptions {
    /// Stop once e_k has more decimal digits than this.
    pub digit_budget: u64,
    pub torsion_bound: u32,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            digit_budget: DEFAULT_DIGIT_BUDGET,
            torsion_bound: TORSION_BOUND,
        }
    }
}

/// Rejects points with `l P = O` for some `l <= bound`.
pub fn check_infinite_order(curve: &Curve, p: &QPoint, bound: u32) -> Result<()> {
    if !curve.contains(p) {
        return Err(Error::NotOnCurve);
    }
    match curve.torsion_order(p, bound) {
        Some(l) => Err(Error::TorsionPoint(l)),
        None => Ok(()),
    }
}

fn exact_quotient(num: &Integer, den: &Integer, k: u32, what: &str) -> Result<Integer> {
    let (q, r) = num.clone().div_rem(den.clone());
    if r != 0 {
        return Err(Error::Verification(format!("k = {k}: {what} is not an exact quotient")));
    }
    Ok(q)
}

/// Next row from the previous one by the duplication formula.
fn step_direct(curve: &Curve, prev: &FermatState) -> Result<FermatState> {
    let k = prev.k + 1;
    let d = curve.double(&prev.point())?;
    let QPoint::Affine { m, n, e } = d.point else {
        return Err(Error::DoublingToIdentity);
    };
    let f = exact_quotient(&e, &prev.e, k, "e_k / e_(k-1)")?;
    let tau = exact_quotient(&Integer::from(&prev.n * 2u32), &f, k, "2 n_(k-1) / F_k")?;
    if Integer::from(tau.abs_ref()) != d.tau {
        return Err(Error::Verification(format!(
            "k = {k}: tau from 2n/F differs from the square root of gcd(A, B)"
        )));
    }
    Ok(FermatState {
        k,
        m,
        n,
        e,
        f,
        tau: Some(tau),
    })
}

/// Extend `states` in place up to `k_max` by repeated doubling.
pub fn extend_direct(curve: &Curve, states: &mut Vec<FermatState>, k_max: u32, opts: &GenerateOptions) -> Result<()> {
    while let Some(last) = states.last() {
        if last.k >= k_max {
            break;
        }
        let next = step_direct(curve, last)?;
        if decimal_digits_estimate(&next.e) > opts.digit_budget {
            return Err(Error::DigitBudget {
                k: next.k,
                budget: opts.digit_budget,
                partial: Box::new(std::mem::take(states)),
            });
        }
        states.push(next);
    }
    Ok(())
}

/// Rows k = 0..=k_max computed by repeated doubling of `p`.
pub fn generate_direct(curve: &Curve, p: &QPoint, k_max: u32, opts: &GenerateOptions) -> Result<Vec<FermatState>> {
    check_infinite_order(curve, p, opts.torsion_bound)?;
    let mut states = vec![FermatState::initial(p)?];
    extend_direct(curve, &mut states, k_max, opts)?;
    Ok(states)
}

/// Rows k = 0..=k_max from the recurrence driven by `|tau_k|`
/// (`tau_abs[k - 1]` for k >= 1). Signs are resolved by exact division;
/// any inconsistency is reported as [`Error::InconsistentTau`].
pub fn generate_recurrence(curve: &Curve, p: &QPoint, tau_abs: &[Integer], k_max: u32) -> Result<Vec<FermatState>> {
    if !curve.contains(p) {
        return Err(Error::NotOnCurve);
    }
    if tau_abs.len() < k_max as usize {
        return Err(Error::Precondition(format!(
            "{} tau values supplied for k_max = {k_max}",
            tau_abs.len()
        )));
    }
    let mut states = vec![FermatState::initial(p)?];
    for k in 1..=k_max {
        let prev = states.last().unwrap();
        let t = &tau_abs[k as usize - 1];
        let next = [t.clone(), Integer::from(-t)]
            .into_iter()
            .find_map(|tau| recurrence_step(curve, prev, tau))
            .ok_or(Error::InconsistentTau(k))?;
        states.push(next);
    }
    Ok(states)
}

fn recurrence_step(curve: &Curve, prev: &FermatState, tau: Integer) -> Option<FermatState> {
    if tau == 0 {
        return None;
    }
    let (a, b, c) = (curve.a(), curve.b(), curve.c());
    let (m0, n0, e0) = (&prev.m, &prev.n, &prev.e);

    // F_k = 2 n_{k-1} / tau_k
    let two_n = Integer::from(n0 * 2u32);
    if !two_n.is_divisible(&tau) {
        return None;
    }
    let f = Integer::from(two_n.div_exact_ref(&tau));
    if f <= 0 {
        return None;
    }

    // m_k = (m^4 - 2b m^2 e^4 - 8c m e^6 + (b^2 - 4ac) e^8) / tau^2
    let e2 = Integer::from(e0.square_ref());
    let e4 = Integer::from(e2.square_ref());
    let e6 = Integer::from(&e4 * &e2);
    let m2 = Integer::from(m0.square_ref());
    let mut num = Integer::from(m2.square_ref());
    num -= Integer::from(b * &m2) * &e4 * 2u32;
    num -= Integer::from(c * m0) * &e6 * 8u32;
    num += (Integer::from(b.square_ref()) - Integer::from(a * c) * 4u32) * Integer::from(e4.square_ref());
    let tau2 = Integer::from(tau.square_ref());
    if !num.is_divisible(&tau2) {
        return None;
    }
    let m = num.div_exact(&tau2);

    // n_k = (-2a m' m e^2 - b m' e^4 F^2 - b m e^4 - 2c e^6 F^2 + m'^3 F^2 - 3 m'^2 m) / tau,
    // with m' = m_{k-1}, m = m_k, e = e_{k-1}
    let f2 = Integer::from(f.square_ref());
    let mut num = Integer::from(a * m0) * &m * &e2 * -2i32;
    num -= Integer::from(b * m0) * &e4 * &f2;
    num -= Integer::from(b * &m) * &e4;
    num -= Integer::from(c * &e6) * &f2 * 2u32;
    num += Integer::from(&m2 * m0) * &f2;
    num -= Integer::from(&m2 * &m) * 3u32;
    if !num.is_divisible(&tau) {
        return None;
    }
    let n = num.div_exact(&tau);

    let e = Integer::from(e0 * &f);
    // a wrong |tau| can still divide exactly while leaving (m, n, e) unreduced
    if Integer::from(m.gcd_ref(&e)) != 1 || Integer::from(n.gcd_ref(&e)) != 1 {
        return None;
    }
    if Integer::from(n.square_ref()) != curve.weighted_rhs(&m, &e) {
        return None;
    }
    Some(FermatState {
        k: prev.k + 1,
        m,
        n,
        e,
        f,
        tau: Some(tau),
    })
}

/// `|tau_k|` for k = 1..=k_max read off generated rows.
pub fn tau_magnitudes(states: &[FermatState]) -> Vec<Integer> {
    states
        .iter()
        .filter_map(|s| s.tau.as_ref().map(|t| Integer::from(t.abs_ref())))
        .collect()
}
