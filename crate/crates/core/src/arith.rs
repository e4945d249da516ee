//! Integer helpers: primes, prime powers, trial-division factorization.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

pub fn is_prime(n: u64) -> bool {
    primal::is_prime(n)
}

/// All primes `p <= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = usize::try_from(limit).expect("sieve limit fits usize");
    primal::Sieve::new(limit)
        .primes_from(2)
        .take_while(|&p| p <= limit)
        .map(|p| p as u64)
        .collect()
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    primal::Primes::all()
        .take(count)
        .map(|p| p as u64)
        .collect()
}

/// Trial-division factorization as `(prime, exponent)` pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Decomposes `q = p^f` with `p` prime, `f >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, f)] => Some((*p, *f)),
        _ => None,
    }
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power(q).is_some()
}

pub fn is_squarefree(m: i64) -> bool {
    m != 0 && factorize(m.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Multiplicative order of `a` modulo `m` (`m >= 1`, `gcd(a, m) = 1`).
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let a = a % m;
    let mut x = a;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % m as u128) as u64;
        k += 1;
    }
    k
}

/// Largest `f` with `p^f <= limit` (0 when `p > limit`).
pub fn max_exponent(p: u64, limit: u64) -> u32 {
    let mut f = 0;
    let mut q = 1u64;
    while let Some(next) = q.checked_mul(p) {
        if next > limit {
            break;
        }
        q = next;
        f += 1;
    }
    f
}

/// Natural logarithm of a big unsigned integer (`x > 0`).
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 960 {
        x.to_f64().expect("fits f64").ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("fits f64").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}
