use rug::ops::Pow;
use rug::Integer;
use serde::Serialize;

use super::rho::{rho_attempt, RhoOutcome};
use super::{is_probable_prime, small_primes};
use crate::error::{Error, Result};

/// Effort limits for [`factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division bound (inclusive).
    pub trial_limit: u32,
    /// Rho iterations allowed per attempt.
    pub rho_iterations: u64,
    /// Attempts (fresh polynomial constants) per cofactor.
    pub rho_attempts: u32,
    pub seed: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_limit: 100_000,
            rho_iterations: 1 << 20,
            rho_attempts: 8,
            seed: 1,
        }
    }
}

impl FactorBudget {
    /// Budget large enough to split products of 18-digit primes.
    pub fn thorough() -> Self {
        FactorBudget {
            rho_iterations: 1 << 34,
            rho_attempts: 4,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    #[serde(with = "crate::intser")]
    pub value: Integer,
    /// `(prime, exponent)` with strictly increasing primes.
    #[serde(with = "crate::intser::pairs")]
    pub factors: Vec<(Integer, u32)>,
    /// Composite cofactors left after the budget ran out.
    #[serde(with = "crate::intser::vec")]
    pub unfactored: Vec<Integer>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_empty()
    }

    pub fn primes(&self) -> impl Iterator<Item = &Integer> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Product of all prime powers and unfactored cofactors.
    pub fn product(&self) -> Integer {
        let mut acc = Integer::from(1);
        for (p, e) in &self.factors {
            acc *= Integer::from(p.pow(*e));
        }
        for c in &self.unfactored {
            acc *= c;
        }
        acc
    }
}

impl std::fmt::Display for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        parts.extend(self.unfactored.iter().map(|c| format!("[{c}]")));
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// splitmix64, for deriving rho constants from the budget seed.
fn next_seed(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn exact_root(n: &Integer) -> Option<(Integer, u32)> {
    for k in (2..=n.significant_bits().min(64)).rev() {
        let (root, rem) = n.clone().root_rem(Integer::new(), k);
        if rem == 0 && root > 1 {
            return Some((root, k));
        }
    }
    None
}

fn split(n: &Integer, budget: &FactorBudget, rng: &mut u64) -> Option<Integer> {
    for _ in 0..budget.rho_attempts {
        let start = 2 + next_seed(rng) % 1_000_003;
        let constant = 1 + next_seed(rng) % 1_000_003;
        match rho_attempt(n, start, constant, budget.rho_iterations) {
            RhoOutcome::Factor(f) => return Some(f),
            RhoOutcome::Degenerate | RhoOutcome::Exhausted => continue,
        }
    }
    None
}

/// Factor `n >= 2` by trial division and Brent-Pollard rho.
///
/// Cofactors that survive every rho attempt are reported in
/// [`Factorization::unfactored`] rather than as an error. The result does not
/// depend on the order in which cofactors are processed.
pub fn factorize(n: &Integer, budget: &FactorBudget) -> Result<Factorization> {
    if *n < 2 {
        return Err(Error::Precondition(format!("factorize needs n >= 2, got {n}")));
    }
    let mut primes: Vec<(Integer, u32)> = Vec::new();
    let mut unfactored = Vec::new();
    let mut rest = n.clone();

    for &p in small_primes().iter().take_while(|&&p| p <= budget.trial_limit) {
        if rest == 1 {
            break;
        }
        if Integer::from(p) * p > rest {
            break;
        }
        let mut e = 0;
        while rest.is_divisible_u(p) {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            primes.push((Integer::from(p), e));
        }
    }

    let mut rng = budget.seed;
    let mut stack = vec![(rest, 1u32)];
    while let Some((c, mult)) = stack.pop() {
        if c == 1 {
            continue;
        }
        if is_probable_prime(&c) {
            primes.push((c, mult));
            continue;
        }
        if let Some((root, k)) = exact_root(&c) {
            stack.push((root, mult * k));
            continue;
        }
        match split(&c, budget, &mut rng) {
            Some(f) => {
                let other = Integer::from(&c / &f);
                stack.push((f, mult));
                stack.push((other, mult));
            }
            None => {
                for _ in 0..mult {
                    unfactored.push(c.clone());
                }
            }
        }
    }

    primes.sort();
    let mut merged: Vec<(Integer, u32)> = Vec::new();
    for (p, e) in primes {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    unfactored.sort();
    Ok(Factorization {
        value: n.clone(),
        factors: merged,
        unfactored,
    })
}
