//! Integer utilities shared by every other module: square roots, primality,
//! factorization, two-square decomposition and CRT.

mod factor;
mod monty;
mod rho;

pub use factor::{factorize, FactorBudget, Factorization};

use std::sync::OnceLock;

use rug::integer::IsPrime;
use rug::ops::RemRounding;
use rug::rand::RandState;
use rug::Integer;

use crate::error::{Error, Result};

/// `(floor(sqrt(n)), is_perfect_square)`.
pub fn isqrt(n: &Integer) -> Result<(Integer, bool)> {
    if *n < 0 {
        return Err(Error::NegativeInput(n.clone()));
    }
    let (root, rem) = n.clone().sqrt_rem(Integer::new());
    let exact = rem == 0;
    Ok((root, exact))
}

pub fn is_square(n: &Integer) -> bool {
    *n >= 0 && n.is_perfect_square()
}

/// Bases that make Miller-Rabin deterministic below [`DETERMINISTIC_LIMIT`].
const MR_BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// 3.3e24: the first twelve prime bases have no common strong pseudoprime below this.
pub const DETERMINISTIC_LIMIT: &str = "3317044064679887385961981";

/// Rounds with random bases above the deterministic range.
pub const RANDOM_ROUNDS: u32 = 64;

const DEFAULT_PRIME_SEED: u64 = 0x5eed_f00d;

fn deterministic_limit() -> &'static Integer {
    static LIMIT: OnceLock<Integer> = OnceLock::new();
    LIMIT.get_or_init(|| DETERMINISTIC_LIMIT.parse().unwrap())
}

pub(crate) fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(100_000))
}

/// Primes up to and including `limit`.
pub fn sieve(limit: u32) -> Vec<u32> {
    let limit = limit as usize;
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn strong_probable_prime(n: &Integer, d: &Integer, s: u32, base: &Integer) -> bool {
    let n_minus_1 = Integer::from(n - 1u32);
    let mut x = match base.clone().pow_mod(d, n) {
        Ok(x) => x,
        Err(_) => return false,
    };
    if x == 1 || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.square() % n;
        if x == n_minus_1 {
            return true;
        }
        if x == 1 {
            return false;
        }
    }
    false
}

/// Miller-Rabin with the default seed.
pub fn is_probable_prime(n: &Integer) -> bool {
    is_probable_prime_seeded(n, DEFAULT_PRIME_SEED)
}

/// Miller-Rabin: deterministic below 3.3e24, [`RANDOM_ROUNDS`] seeded random
/// bases above it.
pub fn is_probable_prime_seeded(n: &Integer, seed: u64) -> bool {
    if *n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if *n == p {
            return true;
        }
        if n.is_divisible_u(p) {
            return false;
        }
    }
    let n_minus_1 = Integer::from(n - 1u32);
    let s = n_minus_1.find_one(0).unwrap_or(0);
    let d = Integer::from(&n_minus_1 >> s);

    if n < deterministic_limit() {
        return MR_BASES
            .iter()
            .all(|&b| strong_probable_prime(n, &d, s, &Integer::from(b)));
    }
    let mut rand = RandState::new();
    rand.seed(&Integer::from(seed));
    let span = Integer::from(n - 3u32);
    (0..RANDOM_ROUNDS).all(|_| {
        let base = Integer::from(span.random_below_ref(&mut rand)) + 2u32;
        strong_probable_prime(n, &d, s, &base)
    })
}

/// Cross-check against GMP's own test; used by tests only.
#[doc(hidden)]
pub fn gmp_probable_prime(n: &Integer) -> bool {
    n.is_probably_prime(40) != IsPrime::No
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: &Integer, p: &Integer) -> Option<Integer> {
    let a = Integer::from(a.rem_euc(p));
    if a == 0 {
        return Some(a);
    }
    if a.legendre(p) != 1 {
        return None;
    }
    let p_minus_1 = Integer::from(p - 1u32);
    let s = p_minus_1.find_one(0).unwrap();
    let q = Integer::from(&p_minus_1 >> s);
    let mut z = Integer::from(2);
    while z.legendre(p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.pow_mod(&q, p).unwrap();
    let mut t = a.clone().pow_mod(&q, p).unwrap();
    let exp = Integer::from(&q + 1u32) >> 1;
    let mut r = a.pow_mod(&exp, p).unwrap();
    while t != 1 {
        let mut i = 0;
        let mut t2 = t.clone();
        while t2 != 1 {
            t2 = t2.square() % p;
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = b.square() % p;
        }
        m = i;
        c = Integer::from(b.square_ref()) % p;
        t = Integer::from(&t * &c) % p;
        r = Integer::from(&r * &b) % p;
    }
    Some(r)
}

/// Decompose a prime `p = 1 mod 4` as `a^2 + b^2` with `a = -1 mod 4` and `b >= 0`.
///
/// Uses the Euclidean (Cornacchia / Hermite-Serret) descent from a square
/// root of -1 modulo `p`.
pub fn two_square(p: &Integer) -> Result<(Integer, Integer)> {
    if *p < 5 || p.mod_u(4) != 1 || !is_probable_prime(p) {
        return Err(Error::NotSumOfTwoSquaresPrime(p.clone()));
    }
    let minus_one = Integer::from(p - 1u32);
    let root = sqrt_mod_prime(&minus_one, p).expect("-1 is a square mod p = 1 mod 4");
    let (limit, _) = isqrt(p)?;
    let mut r0 = p.clone();
    let mut r1 = if Integer::from(&root * 2u32) > *p {
        Integer::from(p - &root)
    } else {
        root
    };
    while r1 > limit {
        let r2 = Integer::from(&r0 % &r1);
        r0 = r1;
        r1 = r2;
    }
    let x = r1;
    let y_sq = Integer::from(p - x.square_ref());
    let (y, exact) = isqrt(&y_sq)?;
    debug_assert!(exact);
    // One of x, y is odd; the odd one is +-a.
    let (odd, even) = if x.is_odd() { (x, y) } else { (y, x) };
    let a = if odd.mod_u(4) == 3 { odd } else { -odd };
    Ok((a, even.abs()))
}

/// Combine `(residue, modulus)` pairs with pairwise-coprime moduli into the
/// unique residue modulo the product. Returns `(residue, product)`.
pub fn crt_combine(residues: &[(Integer, Integer)]) -> Result<(Integer, Integer)> {
    let mut acc = Integer::from(0);
    let mut modulus = Integer::from(1);
    for (r, m) in residues {
        if *m <= 0 {
            return Err(Error::Precondition(format!("modulus {m} must be positive")));
        }
        let g = Integer::from(modulus.gcd_ref(m));
        if g != 1 {
            return Err(Error::NonCoprimeModuli(modulus, m.clone()));
        }
        // acc + modulus * t = r (mod m)
        let inv = modulus.clone().invert(m).unwrap_or_default();
        let diff = Integer::from(r - &acc);
        let t = (diff * inv).rem_euc(m);
        acc += Integer::from(&modulus * &t);
        modulus *= m;
        acc = acc.rem_euc(&modulus);
    }
    Ok((acc, modulus))
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(n: &Integer, p: &Integer) -> Option<u32> {
    if *n == 0 {
        return None;
    }
    let mut v = 0;
    let mut rest = n.clone().abs();
    while rest.is_divisible(p) {
        rest /= p;
        v += 1;
    }
    Some(v)
}

pub fn is_power_of_two(n: u64) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Approximate decimal digit count of `|n|` from its bit length.
pub fn decimal_digits_estimate(n: &Integer) -> u64 {
    ((n.significant_bits() as f64) * std::f64::consts::LOG10_2).ceil() as u64
}

/// Natural logarithm of a positive integer, accurate to about 1e-15 relative,
/// without converting the whole integer to floating point.
pub fn ln_integer(n: &Integer) -> f64 {
    assert!(*n > 0, "logarithm of a nonpositive integer");
    let bits = n.significant_bits();
    if bits <= 1000 {
        return n.to_f64().ln();
    }
    let shift = bits - 64;
    let top = Integer::from(n >> shift).to_f64();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Integer {
        Integer::from(v)
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&int(0)).unwrap(), (int(0), true));
        assert_eq!(isqrt(&int(12769)).unwrap(), (int(113), true));
        assert_eq!(isqrt(&int(7055)).unwrap(), (int(83), false));
        assert!(matches!(isqrt(&int(-4)), Err(Error::NegativeInput(_))));
    }

    #[test]
    fn primality_examples() {
        assert!(is_probable_prime(&int(257)));
        assert!(!is_probable_prime(&int(1)));
        assert!(!is_probable_prime(&int(0)));
        assert!(is_probable_prime(&int(2)));
        assert!(is_probable_prime(&int(623_013_889)));
        // strong pseudoprime to bases 2..=11, caught by the larger base set
        assert!(!is_probable_prime(&int(3_215_031_751)));
        assert!(!is_probable_prime(&"3825123056546413051".parse().unwrap()));
        let m127 = Integer::from(Integer::u_pow_u(2, 127)) - 1u32;
        assert!(is_probable_prime(&m127));
        assert!(!is_probable_prime(&(m127.clone() * 3u32)));
    }

    #[test]
    fn primality_agrees_with_trial_division_below_20000() {
        let primes = sieve(20_000);
        let mut idx = 0;
        for n in 0..=20_000u32 {
            let expect = idx < primes.len() && primes[idx] == n;
            if expect {
                idx += 1;
            }
            assert_eq!(is_probable_prime(&Integer::from(n)), expect, "n = {n}");
        }
    }

    #[test]
    fn two_square_examples() {
        assert_eq!(two_square(&int(5)).unwrap(), (int(-1), int(2)));
        assert_eq!(two_square(&int(113)).unwrap(), (int(7), int(8)));
        assert_eq!(two_square(&int(13)).unwrap(), (int(3), int(2)));
        assert!(two_square(&int(7)).is_err());
        assert!(two_square(&int(21)).is_err());
        assert!(two_square(&int(2)).is_err());
    }

    #[test]
    fn crt_examples() {
        let pairs = |v: &[(i64, i64)]| v.iter().map(|&(r, m)| (int(r), int(m))).collect::<Vec<_>>();
        assert_eq!(crt_combine(&pairs(&[(1, 3), (2, 7)])).unwrap(), (int(16), int(21)));
        assert_eq!(crt_combine(&pairs(&[(0, 5)])).unwrap(), (int(0), int(5)));
        assert_eq!(crt_combine(&pairs(&[(2, 3), (2, 5)])).unwrap(), (int(2), int(15)));
        assert!(matches!(
            crt_combine(&pairs(&[(1, 6), (2, 9)])),
            Err(Error::NonCoprimeModuli(_, _))
        ));
    }

    #[test]
    fn crt_matches_enumeration() {
        for (r1, r2) in [(0, 0), (1, 2), (2, 6), (3, 4)] {
            let (x, m) = crt_combine(&[(int(r1), int(3)), (int(r2), int(7))]).unwrap();
            let brute = (0..21).find(|v| v % 3 == r1 % 3 && v % 7 == r2).unwrap();
            assert_eq!((x, m), (int(brute), int(21)));
        }
    }

    #[test]
    fn sqrt_mod_prime_roundtrip() {
        for &p in &[7u32, 13, 17, 41, 97, 113, 257, 65537] {
            let p = Integer::from(p);
            for a in 1..50u32 {
                let a = Integer::from(a);
                if let Some(r) = sqrt_mod_prime(&a, &p) {
                    assert_eq!(Integer::from(r.square_ref()) % &p, Integer::from(&a % &p));
                } else {
                    assert_eq!(a.legendre(&p), -1);
                }
            }
        }
    }

    #[test]
    fn ln_integer_large() {
        let n = Integer::from(Integer::u_pow_u(3, 5000));
        let expect = 5000.0 * 3f64.ln();
        assert!((ln_integer(&n) - expect).abs() / expect < 1e-12);
        assert_eq!(ln_integer(&int(1)), 0.0);
    }
}
