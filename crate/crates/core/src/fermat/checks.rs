//! Checks over a generated sequence: pairwise gcds, parity, tau invariants
//! and growth.

use rug::Integer;
use serde::Serialize;

use super::FermatState;
use crate::arith::ln_integer;
use crate::curve::Curve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    /// Every e_k odd, all pairwise gcds 1.
    AllOne,
    /// e_t is the first even denominator; F_k is even for every k >= t.
    EventuallyTwo { from: u32 },
}

#[derive(Debug, Clone, Serialize)]
pub struct PairGcd {
    pub k: u32,
    pub l: u32,
    #[serde(with = "crate::intser")]
    pub gcd: Integer,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoprimalityReport {
    pub pairs: Vec<PairGcd>,
    pub regime: Regime,
    pub failures: Vec<String>,
}

impl CoprimalityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// All gcd(F_k, F_l) for k < l, each required to be 1 or 2.
pub fn coprimality_check(states: &[FermatState]) -> Result<CoprimalityReport> {
    if states.len() < 2 {
        return Err(Error::Precondition("coprimality needs at least two rows".into()));
    }
    let first_even = states.iter().find(|s| s.e.is_even()).map(|s| s.k);
    let regime = match first_even {
        Some(t) => Regime::EventuallyTwo { from: t },
        None => Regime::AllOne,
    };
    let mut pairs = Vec::new();
    let mut failures = Vec::new();
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            let g = Integer::from(a.f.gcd_ref(&b.f));
            if g != 1 && g != 2 {
                failures.push(format!("gcd(F_{}, F_{}) = {g}", a.k, b.k));
            }
            let expect_two = first_even.is_some_and(|t| a.k >= t);
            if (g == 2) != expect_two && (g == 1 || g == 2) {
                failures.push(format!(
                    "gcd(F_{}, F_{}) = {g} contradicts the parity regime {regime:?}",
                    a.k, b.k
                ));
            }
            pairs.push(PairGcd { k: a.k, l: b.k, gcd: g });
        }
    }
    Ok(CoprimalityReport {
        pairs,
        regime,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityCase {
    /// e_k odd: F_k odd and tau_k even.
    OddDenominator,
    /// e_k and e_{k-1} even: F_k even and tau_k odd.
    BothEven,
    /// e_k even, e_{k-1} odd: no prediction.
    Exceptional,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityRow {
    pub k: u32,
    pub case: ParityCase,
    pub f_even: bool,
    pub tau_even: bool,
    /// `None` in the exceptional case.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityReport {
    pub rows: Vec<ParityRow>,
    pub failures: Vec<String>,
}

impl ParityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn exceptional(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows
            .iter()
            .filter(|r| r.case == ParityCase::Exceptional)
            .map(|r| r.k)
    }
}

/// Parity of F_k against tau_k for k >= 1.
pub fn parity_audit(states: &[FermatState]) -> ParityReport {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for w in states.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        let Some(tau) = cur.tau.as_ref() else { continue };
        let f_even = cur.f.is_even();
        let tau_even = tau.is_even();
        let case = match (cur.e.is_even(), prev.e.is_even()) {
            (false, _) => ParityCase::OddDenominator,
            (true, true) => ParityCase::BothEven,
            (true, false) => ParityCase::Exceptional,
        };
        let holds = match case {
            ParityCase::OddDenominator => Some(!f_even && tau_even),
            ParityCase::BothEven => Some(f_even && !tau_even),
            ParityCase::Exceptional => None,
        };
        if holds == Some(false) {
            failures.push(format!(
                "k = {}: {case:?} but F even = {f_even}, tau even = {tau_even}",
                cur.k
            ));
        }
        rows.push(ParityRow {
            k: cur.k,
            case,
            f_even,
            tau_even,
            holds,
        });
    }
    ParityReport { rows, failures }
}

#[derive(Debug, Clone, Serialize)]
pub struct TauInvariantRow {
    pub k: u32,
    /// tau_k^2 = gcd(A, B), recomputed from row k-1.
    pub square_is_gcd: bool,
    /// tau_k^2 divides disc/4.
    pub divides_quarter_disc: bool,
    /// F_k divides 2 n_{k-1} with quotient tau_k.
    pub f_divides_two_n: bool,
    /// e_k = e_{k-1} F_k and the row satisfies the curve equation.
    pub row_consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TauInvariantReport {
    pub rows: Vec<TauInvariantRow>,
    pub failures: Vec<String>,
}

impl TauInvariantReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Recompute gcd(A, B) from each row's predecessor and compare with tau_k^2.
pub fn verify_tau_invariants(curve: &Curve, states: &[FermatState]) -> TauInvariantReport {
    let quarter = Integer::from(curve.disc() / 4u32);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    if let Some(first) = states.first() {
        if first.f != first.e || !curve.contains(&first.point()) {
            failures.push("row 0 is not (m_0, n_0, e_0) with F_0 = e_0".into());
        }
    }
    for w in states.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        let Some(tau) = cur.tau.as_ref() else {
            failures.push(format!("k = {}: tau missing", cur.k));
            continue;
        };
        let tau2 = Integer::from(tau.square_ref());
        let (a, b) = curve.duplication_fraction(&prev.m, &prev.n, &prev.e);
        let g = a.gcd(&b);
        let row = TauInvariantRow {
            k: cur.k,
            square_is_gcd: g == tau2,
            divides_quarter_disc: quarter.is_divisible(&tau2),
            f_divides_two_n: Integer::from(tau * &cur.f) == Integer::from(&prev.n * 2u32),
            row_consistent: cur.k == prev.k + 1
                && Integer::from(&prev.e * &cur.f) == cur.e
                && curve.contains(&cur.point()),
        };
        for (ok, what) in [
            (row.square_is_gcd, "tau^2 != gcd(A, B)"),
            (row.divides_quarter_disc, "tau^2 does not divide disc/4"),
            (row.f_divides_two_n, "tau F != 2 n_(k-1)"),
            (row.row_consistent, "row inconsistent with its predecessor"),
        ] {
            if !ok {
                failures.push(format!("k = {}: {what}", cur.k));
            }
        }
        rows.push(row);
    }
    TauInvariantReport { rows, failures }
}

/// Natural-log error bound per evaluation, relative to the magnitude of the
/// logarithm (leading 64 bits plus an exact shift).
pub const LN_RELATIVE_ERROR: f64 = 1e-14;

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    /// r_k = ln(F_k) / 4^k.
    pub ratios: Vec<f64>,
    /// |r_{k+1} - r_k|.
    pub differences: Vec<f64>,
    /// h(2^K P) / 4^K with h = ln max(|m|, e^2) and K the last index.
    pub height_estimate: f64,
    /// (3/8) of the height estimate.
    pub target: f64,
    /// |r_K - target|.
    pub gap: f64,
    /// Bound on the floating-point error in `gap`.
    pub error_bound: f64,
    /// Successive differences decrease strictly from k = 5 on.
    pub monotone_from_five: bool,
}

/// Growth of ln F_k against the height of 2^K P; needs rows 0..=5 at least.
pub fn growth_report(states: &[FermatState]) -> Result<GrowthReport> {
    if states.len() < 6 {
        return Err(Error::Precondition(format!(
            "growth report needs at least 6 rows, got {}",
            states.len()
        )));
    }
    let ratios: Vec<f64> = states
        .iter()
        .map(|s| ln_integer(&s.f) / 4f64.powi(s.k as i32))
        .collect();
    let differences: Vec<f64> = ratios.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    // differences[i] is between r_i and r_{i+1}; compare from index 5 on
    let monotone_from_five = differences
        .iter()
        .skip(5)
        .zip(differences.iter().skip(6))
        .all(|(a, b)| b < a);

    let last = states.last().unwrap();
    let ln_m = if last.m == 0 {
        f64::NEG_INFINITY
    } else {
        ln_integer(&Integer::from(last.m.abs_ref()))
    };
    let ln_e2 = 2.0 * ln_integer(&last.e);
    let h = ln_m.max(ln_e2);
    let scale = 4f64.powi(last.k as i32);
    let height_estimate = h / scale;
    let target = 0.375 * height_estimate;
    let error_bound = (ratios.last().unwrap().abs() + target.abs()) * LN_RELATIVE_ERROR;
    let gap = (ratios.last().unwrap() - target).abs();
    Ok(GrowthReport {
        ratios,
        differences,
        height_estimate,
        target,
        gap,
        error_bound,
        monotone_from_five,
    })
}
