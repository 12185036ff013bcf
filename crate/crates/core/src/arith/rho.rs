//! Pollard rho with Brent's cycle detection and batched gcds.

use rug::Integer;

use super::monty::{BigRing, ModRing, Monty};

/// Number of differences multiplied together between gcd evaluations.
const BATCH: u64 = 128;

/// Outcome of a single rho attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum RhoOutcome {
    Factor(Integer),
    /// The walk collapsed onto the full modulus; retry with another constant.
    Degenerate,
    Exhausted,
}

fn brent<R: ModRing>(ring: &R, n: &Integer, start: u64, constant: u64, max_iter: u64) -> RhoOutcome {
    let c = ring.from_u64(constant);
    let step = |v: &R::Elem| ring.add(&ring.mul(v, v), &c);

    let mut y = ring.from_u64(start);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = ring.from_u64(1);
    let mut g = Integer::from(1);
    let mut r: u64 = 1;
    let mut iterations: u64 = 0;

    while g == 1 {
        x = y.clone();
        for _ in 0..r {
            y = step(&y);
        }
        iterations += r;
        let mut k = 0;
        while k < r && g == 1 {
            ys = y.clone();
            let run = BATCH.min(r - k);
            for _ in 0..run {
                y = step(&y);
                q = ring.mul(&q, &ring.sub(&x, &y));
            }
            g = ring.gcd_with_modulus(&q);
            k += run;
            iterations += run;
        }
        if iterations > max_iter && g == 1 {
            return RhoOutcome::Exhausted;
        }
        r *= 2;
    }

    if g == *n {
        // Batch overshot: replay it one step at a time.
        loop {
            ys = step(&ys);
            g = ring.gcd_with_modulus(&ring.sub(&x, &ys));
            if g != 1 {
                break;
            }
        }
    }
    if g == *n {
        RhoOutcome::Degenerate
    } else {
        RhoOutcome::Factor(g)
    }
}

/// One rho attempt on odd composite `n` using `x -> x^2 + constant`.
pub(crate) fn rho_attempt(n: &Integer, start: u64, constant: u64, max_iter: u64) -> RhoOutcome {
    debug_assert!(n.is_odd());
    match n.significant_bits() {
        0..=64 => brent(&Monty::<1>::new(n), n, start, constant, max_iter),
        65..=128 => brent(&Monty::<2>::new(n), n, start, constant, max_iter),
        129..=192 => brent(&Monty::<3>::new(n), n, start, constant, max_iter),
        193..=256 => brent(&Monty::<4>::new(n), n, start, constant, max_iter),
        257..=384 => brent(&Monty::<6>::new(n), n, start, constant, max_iter),
        385..=512 => brent(&Monty::<8>::new(n), n, start, constant, max_iter),
        _ => brent(&BigRing::new(n), n, start, constant, max_iter),
    }
}
