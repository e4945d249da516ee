use crate::arith::is_prime;
use crate::error::{invalid, Result};

/// Dense polynomial over the prime field with `p` elements, lowest degree first.
///
/// Residues are always reduced into `[0, p)` and the vector is trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    coeffs: Vec<u64>,
    p: u64,
}

impl ModPoly {
    pub fn new(coeffs: Vec<u64>, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return invalid(format!("modulus {p} is not prime"));
        }
        Ok(Self::from_reduced(
            coeffs.into_iter().map(|c| c % p).collect(),
            p,
        ))
    }

    fn from_reduced(mut coeffs: Vec<u64>, p: u64) -> Self {
        trim(&mut coeffs);
        Self { coeffs, p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// The monomial `x`.
    pub fn x(p: u64) -> Self {
        Self::from_reduced(vec![0, 1 % p], p)
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect();
        Self::from_reduced(c, p)
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                if a >= b {
                    a - b
                } else {
                    a + (p - b)
                }
            })
            .collect();
        Self::from_reduced(c, p)
    }

    /// Scales to leading coefficient one; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None | Some(1) => self.clone(),
            Some(&lc) => {
                let inv = inv_mod(lc, self.p);
                let c = self
                    .coeffs
                    .iter()
                    .map(|&c| mul_mod(c, inv, self.p))
                    .collect();
                Self::from_reduced(c, self.p)
            }
        }
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let p = self.p;
        let d = divisor.degree().expect("division by zero polynomial");
        let inv = inv_mod(divisor.coeffs[d], p);
        if self.coeffs.len() <= d {
            return (Self::from_reduced(Vec::new(), p), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - d];
        for k in (d..rem.len()).rev() {
            let c = mul_mod(rem[k], inv, p);
            rem[k] = 0;
            if c == 0 {
                continue;
            }
            quot[k - d] = c;
            for j in 0..d {
                let t = mul_mod(c, divisor.coeffs[j], p);
                rem[k - d + j] = sub_mod(rem[k - d + j], t, p);
            }
        }
        rem.truncate(d);
        (Self::from_reduced(quot, p), Self::from_reduced(rem, p))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self * other mod modulus` for a monic `modulus`.
    pub fn mul_rem(&self, other: &Self, modulus: &Self) -> Self {
        debug_assert_eq!(modulus.coeffs.last(), Some(&1));
        let c = mul_rem_slices(&self.coeffs, &other.coeffs, &modulus.coeffs, self.p);
        Self::from_reduced(c, self.p)
    }

    /// `self^e mod modulus` for a monic `modulus`.
    pub fn pow_rem(&self, mut e: u64, modulus: &Self) -> Self {
        let p = self.p;
        let mut base = self.rem(modulus);
        let mut acc = Self::from_reduced(vec![1 % p], p).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_rem(&base, modulus);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_rem(&base, modulus);
            }
        }
        acc
    }
}

fn trim(c: &mut Vec<u64>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    if p <= u32::MAX as u64 {
        a * b % p
    } else {
        (a as u128 * b as u128 % p as u128) as u64
    }
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (p - b)
    }
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse in the prime field (Fermat).
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Lazily reduced accumulator for products of residues.
trait Accumulator: Copy {
    const ZERO: Self;
    fn mul_add(&mut self, a: u64, b: u64, p: u64);
    fn reduce(self, p: u64) -> u64;
}

impl Accumulator for u64 {
    const ZERO: Self = 0;
    #[inline]
    fn mul_add(&mut self, a: u64, b: u64, _p: u64) {
        *self += a * b;
    }
    #[inline]
    fn reduce(self, p: u64) -> u64 {
        self % p
    }
}

impl Accumulator for u128 {
    const ZERO: Self = 0;
    #[inline]
    fn mul_add(&mut self, a: u64, b: u64, _p: u64) {
        *self += a as u128 * b as u128;
    }
    #[inline]
    fn reduce(self, p: u64) -> u64 {
        (self % p as u128) as u64
    }
}

/// Reduces every product; used for moduli of 32 bits and more.
#[derive(Clone, Copy)]
struct Eager(u64);

impl Accumulator for Eager {
    const ZERO: Self = Eager(0);
    #[inline]
    fn mul_add(&mut self, a: u64, b: u64, p: u64) {
        let t = mul_mod(a, b, p);
        self.0 = sub_mod(self.0, p - t, p);
    }
    #[inline]
    fn reduce(self, _p: u64) -> u64 {
        self.0
    }
}

fn mul_rem_slices(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Each accumulator slot receives at most `terms` products of size < p^2.
    let terms = (a.len().min(b.len()) + a.len() + b.len()) as u128;
    let pm1 = (p - 1) as u128;
    let fits_u64 = (pm1 * pm1)
        .checked_mul(terms)
        .is_some_and(|bound| bound < u64::MAX as u128);
    if fits_u64 {
        mul_rem_generic::<u64>(a, b, m, p)
    } else if p <= u32::MAX as u64 {
        mul_rem_generic::<u128>(a, b, m, p)
    } else {
        mul_rem_generic::<Eager>(a, b, m, p)
    }
}

fn mul_rem_generic<A: Accumulator>(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![A::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (slot, &y) in acc[i..].iter_mut().zip(b) {
            slot.mul_add(x, y, p);
        }
    }
    let d = m.len() - 1;
    if acc.len() > d {
        let neg_m: Vec<u64> = m[..d].iter().map(|&c| (p - c) % p).collect();
        for k in (d..acc.len()).rev() {
            let c = acc[k].reduce(p);
            acc[k] = A::ZERO;
            if c == 0 {
                continue;
            }
            for (slot, &y) in acc[k - d..k].iter_mut().zip(&neg_m) {
                slot.mul_add(c, y, p);
            }
        }
        acc.truncate(d);
    }
    let mut out: Vec<u64> = acc.into_iter().map(|v| v.reduce(p)).collect();
    trim(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(c: &[u64], p: u64) -> ModPoly {
        ModPoly::new(c.to_vec(), p).unwrap()
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(ModPoly::new(vec![1, 1], 15).is_err());
    }

    #[test]
    fn residues_reduced() {
        assert_eq!(mp(&[7, 12, 5], 5).coeffs(), &[2, 2]);
    }

    #[test]
    fn gcd_and_division() {
        // (x - 1)(x - 2) and (x - 1)(x - 3) over F_7
        let a = mp(&[2, 4, 1], 7);
        let b = mp(&[3, 3, 1], 7);
        assert_eq!(a.gcd(&b), mp(&[6, 1], 7));
        let (q, r) = a.div_rem(&mp(&[6, 1], 7));
        assert_eq!(q, mp(&[5, 1], 7));
        assert!(r.is_zero());
    }

    #[test]
    fn frobenius_fixes_prime_field() {
        let f = mp(&[1, 0, 0, 1, 1], 11);
        let x = ModPoly::x(11);
        let xp = x.pow_rem(11, &f);
        let lhs = x.pow_rem(2 * 11, &f);
        assert_eq!(xp.mul_rem(&xp, &f), lhs);
    }

    #[test]
    fn accumulator_paths_agree() {
        let a = [3u64, 1, 4, 1, 5];
        let b = [9u64, 2, 6, 5, 3];
        let m = [7u64, 1, 8, 2, 1];
        let p = 11;
        let x = mul_rem_generic::<u64>(&a, &b, &m, p);
        assert_eq!(x, mul_rem_generic::<u128>(&a, &b, &m, p));
        assert_eq!(x, mul_rem_generic::<Eager>(&a, &b, &m, p));
    }

    #[test]
    fn wide_modulus() {
        let p = 18_446_744_073_709_551_557u64; // largest 64-bit prime
        let f = mp(&[1, 0, 1], p);
        let x = ModPoly::x(p);
        // x^2 = -1 mod (x^2 + 1), so x^4 = 1
        assert_eq!(x.pow_rem(4, &f), mp(&[1], p));
    }
}
