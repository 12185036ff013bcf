//! Fixed-width Montgomery arithmetic for odd moduli of up to `64 * L` bits.
//!
//! Only what the rho iteration needs: multiplication, addition,
//! subtraction and conversion in and out of the Montgomery domain.

use rug::integer::Order;
use rug::Integer;

/// Modular ring abstraction used by the rho iteration, so that the same
/// cycle-finding code runs on fixed-width limbs or on `rug` integers.
pub(crate) trait ModRing {
    type Elem: Clone;

    fn from_u64(&self, v: u64) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// gcd of the represented residue with the modulus.
    fn gcd_with_modulus(&self, a: &Self::Elem) -> Integer;
}

#[inline(always)]
fn mac(acc: u64, a: u64, b: u64, carry: u64) -> (u64, u64) {
    let t = (acc as u128) + (a as u128) * (b as u128) + (carry as u128);
    (t as u64, (t >> 64) as u64)
}

#[inline(always)]
fn adc(a: u64, b: u64, carry: u64) -> (u64, u64) {
    let t = (a as u128) + (b as u128) + (carry as u128);
    (t as u64, (t >> 64) as u64)
}

#[inline(always)]
fn sbb(a: u64, b: u64, borrow: u64) -> (u64, u64) {
    let t = (a as u128).wrapping_sub((b as u128) + (borrow as u128));
    (t as u64, ((t >> 64) as u64) & 1)
}

#[derive(Clone, Debug)]
pub(crate) struct Monty<const L: usize> {
    n: [u64; L],
    n_int: Integer,
    /// -n^{-1} mod 2^64
    ninv: u64,
    r2: [u64; L],
}

fn to_limbs<const L: usize>(v: &Integer) -> [u64; L] {
    let digits = v.to_digits::<u64>(Order::Lsf);
    assert!(digits.len() <= L, "value does not fit in {L} limbs");
    let mut out = [0u64; L];
    out[..digits.len()].copy_from_slice(&digits);
    out
}

fn from_limbs<const L: usize>(v: &[u64; L]) -> Integer {
    Integer::from_digits(&v[..], Order::Lsf)
}

impl<const L: usize> Monty<L> {
    pub(crate) fn new(n: &Integer) -> Self {
        assert!(n.is_odd() && *n > 1, "Montgomery modulus must be odd and > 1");
        assert!(n.significant_bits() as usize <= 64 * L);
        let limbs = to_limbs::<L>(n);
        // Newton iteration for n0^{-1} mod 2^64.
        let n0 = limbs[0];
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n0.wrapping_mul(inv)));
        }
        let r2 = Integer::from(Integer::u_pow_u(2, (128 * L) as u32)) % n;
        Monty {
            n: limbs,
            n_int: n.clone(),
            ninv: inv.wrapping_neg(),
            r2: to_limbs::<L>(&r2),
        }
    }

    #[inline]
    fn geq_n(&self, t: &[u64; L]) -> bool {
        for i in (0..L).rev() {
            if t[i] != self.n[i] {
                return t[i] > self.n[i];
            }
        }
        true
    }

    #[inline]
    fn sub_n(&self, t: &mut [u64; L]) {
        let mut borrow = 0;
        for i in 0..L {
            let (d, b) = sbb(t[i], self.n[i], borrow);
            t[i] = d;
            borrow = b;
        }
    }

    /// CIOS Montgomery product a*b*R^{-1} mod n.
    #[inline]
    pub(crate) fn mont_mul(&self, a: &[u64; L], b: &[u64; L]) -> [u64; L] {
        let mut t = [0u64; L];
        let mut t_hi = 0u64;
        for &bi in b.iter() {
            let mut c = 0u64;
            for j in 0..L {
                let (lo, hi) = mac(t[j], a[j], bi, c);
                t[j] = lo;
                c = hi;
            }
            let (s, t_top) = adc(t_hi, c, 0);
            t_hi = s;

            let m = t[0].wrapping_mul(self.ninv);
            let (_, mut c) = mac(t[0], m, self.n[0], 0);
            for j in 1..L {
                let (lo, hi) = mac(t[j], m, self.n[j], c);
                t[j - 1] = lo;
                c = hi;
            }
            let (s, c2) = adc(t_hi, c, 0);
            t[L - 1] = s;
            t_hi = t_top + c2;
        }
        if t_hi != 0 || self.geq_n(&t) {
            self.sub_n(&mut t);
        }
        t
    }

    pub(crate) fn to_monty(&self, v: &Integer) -> [u64; L] {
        let reduced = Integer::from(v % &self.n_int);
        let reduced = if reduced < 0 { reduced + &self.n_int } else { reduced };
        self.mont_mul(&to_limbs::<L>(&reduced), &self.r2)
    }

    #[cfg(test)]
    pub(crate) fn from_monty(&self, v: &[u64; L]) -> Integer {
        let mut one = [0u64; L];
        one[0] = 1;
        from_limbs(&self.mont_mul(v, &one))
    }
}

impl<const L: usize> ModRing for Monty<L> {
    type Elem = [u64; L];

    fn from_u64(&self, v: u64) -> [u64; L] {
        self.to_monty(&Integer::from(v))
    }

    #[inline]
    fn mul(&self, a: &[u64; L], b: &[u64; L]) -> [u64; L] {
        self.mont_mul(a, b)
    }

    #[inline]
    fn add(&self, a: &[u64; L], b: &[u64; L]) -> [u64; L] {
        let mut out = [0u64; L];
        let mut carry = 0;
        for i in 0..L {
            let (s, c) = adc(a[i], b[i], carry);
            out[i] = s;
            carry = c;
        }
        if carry != 0 || self.geq_n(&out) {
            self.sub_n(&mut out);
        }
        out
    }

    #[inline]
    fn sub(&self, a: &[u64; L], b: &[u64; L]) -> [u64; L] {
        let mut out = [0u64; L];
        let mut borrow = 0;
        for i in 0..L {
            let (d, bw) = sbb(a[i], b[i], borrow);
            out[i] = d;
            borrow = bw;
        }
        if borrow != 0 {
            let mut carry = 0;
            for i in 0..L {
                let (s, c) = adc(out[i], self.n[i], carry);
                out[i] = s;
                carry = c;
            }
        }
        out
    }

    fn gcd_with_modulus(&self, a: &[u64; L]) -> Integer {
        // a = xR mod n and gcd(R, n) = 1, so the Montgomery form has the same gcd.
        from_limbs(a).gcd(&self.n_int)
    }
}

/// Plain `rug` residue ring, used above the fixed-width sizes.
#[derive(Clone, Debug)]
pub(crate) struct BigRing {
    n: Integer,
}

impl BigRing {
    pub(crate) fn new(n: &Integer) -> Self {
        BigRing { n: n.clone() }
    }
}

impl ModRing for BigRing {
    type Elem = Integer;

    fn from_u64(&self, v: u64) -> Integer {
        Integer::from(v) % &self.n
    }

    fn mul(&self, a: &Integer, b: &Integer) -> Integer {
        Integer::from(a * b) % &self.n
    }

    fn add(&self, a: &Integer, b: &Integer) -> Integer {
        let s = Integer::from(a + b);
        if s >= self.n {
            s - &self.n
        } else {
            s
        }
    }

    fn sub(&self, a: &Integer, b: &Integer) -> Integer {
        let d = Integer::from(a - b);
        if d < 0 {
            d + &self.n
        } else {
            d
        }
    }

    fn gcd_with_modulus(&self, a: &Integer) -> Integer {
        a.clone().gcd(&self.n)
    }
}
