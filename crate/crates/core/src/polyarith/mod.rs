//! Exact integer and modular polynomial arithmetic.
//!
//! Provides the degree pattern of `f mod p` (for splitting types), exact
//! polynomial discriminants and Sturm real-root counts.

mod int_poly;
mod mod_poly;

pub use int_poly::IntPoly;
#[cfg(test)]
pub(crate) use mod_poly::pow_mod;
pub use mod_poly::ModPoly;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Result};

/// Degree pattern of a polynomial reduced modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorDegrees {
    /// Degrees of the irreducible factors, ascending.
    Squarefree(Vec<usize>),
    /// `f mod p` has a repeated factor (ramified prime or index divisor).
    NotSquarefree,
}

/// Degree pattern restricted to factors of degree at most a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartialDegrees {
    Squarefree {
        /// Degrees of the irreducible factors found, ascending.
        degrees: Vec<usize>,
        /// Total degree of the part whose factors all exceed the bound.
        unresolved: usize,
    },
    NotSquarefree,
}

fn check_monic(f: &IntPoly) -> Result<usize> {
    match f.degree() {
        None => invalid("zero polynomial"),
        Some(_) if !f.is_monic() => invalid(format!("polynomial {f} is not monic")),
        Some(0) => invalid("constant polynomial"),
        Some(n) => Ok(n),
    }
}

/// Degrees of the irreducible factors of `f mod p`, by distinct-degree factorization.
pub fn factor_degrees(f: &IntPoly, p: u64) -> Result<FactorDegrees> {
    let n = check_monic(f)?;
    Ok(match factor_degrees_bounded(f, p, n)? {
        PartialDegrees::Squarefree { degrees, .. } => FactorDegrees::Squarefree(degrees),
        PartialDegrees::NotSquarefree => FactorDegrees::NotSquarefree,
    })
}

/// Distinct-degree factorization that stops once factor degrees exceed `max_degree`.
pub fn factor_degrees_bounded(f: &IntPoly, p: u64, max_degree: usize) -> Result<PartialDegrees> {
    let n = check_monic(f)?;
    let fp = f.reduce_mod(p)?;
    if n == 1 {
        return Ok(if max_degree >= 1 {
            PartialDegrees::Squarefree {
                degrees: vec![1],
                unresolved: 0,
            }
        } else {
            PartialDegrees::Squarefree {
                degrees: vec![],
                unresolved: 1,
            }
        });
    }
    if fp.gcd(&fp.derivative()).degree() != Some(0) {
        return Ok(PartialDegrees::NotSquarefree);
    }

    let x = ModPoly::x(p);
    let mut rest = fp;
    let mut frob = x.clone();
    let mut degrees = Vec::new();
    let mut i = 1;
    while i <= max_degree && 2 * i <= deg(&rest) {
        frob = frob.pow_rem(p, &rest);
        let g = frob.sub(&x).gcd(&rest);
        let dg = deg(&g);
        if dg > 0 {
            degrees.extend(std::iter::repeat_n(i, dg / i));
            rest = rest.div_rem(&g).0;
            frob = frob.rem(&rest);
        }
        i += 1;
    }
    let left = deg(&rest);
    let mut unresolved = 0;
    if left > 0 {
        if 2 * i > left && left <= max_degree {
            // every factor of degree < i is gone, so the rest is irreducible
            degrees.push(left);
        } else {
            unresolved = left;
        }
    }
    Ok(PartialDegrees::Squarefree {
        degrees,
        unresolved,
    })
}

fn deg(f: &ModPoly) -> usize {
    f.degree().unwrap_or(0)
}

/// `disc(f) = (-1)^{n(n-1)/2} Res(f, f')` for monic `f`, exact.
pub fn poly_discriminant(f: &IntPoly) -> Result<BigInt> {
    let n = check_monic(f)?;
    if n == 1 {
        return Ok(BigInt::one());
    }
    let res = resultant(f, &f.derivative());
    Ok(if (n * (n - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    })
}

/// Determinant of the Sylvester matrix, by fraction-free (Bareiss) elimination.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    let (Some(m), Some(k)) = (f.degree(), g.degree()) else {
        return BigInt::zero();
    };
    let size = m + k;
    if size == 0 {
        return BigInt::one();
    }
    let mut a = vec![vec![BigInt::zero(); size]; size];
    for row in 0..k {
        for (j, c) in f.coeffs().iter().rev().enumerate() {
            a[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            a[k + row][row + j] = c.clone();
        }
    }
    bareiss_determinant(a)
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Number of real roots of a squarefree `f`, by Sturm sign variations over `(-inf, inf)`.
pub fn count_real_roots(f: &IntPoly) -> Result<usize> {
    let Some(n) = f.degree() else {
        return invalid("zero polynomial");
    };
    if n == 0 {
        return Ok(0);
    }
    let mut seq = vec![f.primitive_part(), f.derivative().primitive_part()];
    loop {
        let len = seq.len();
        let r = seq[len - 2].signed_pseudo_rem(&seq[len - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r.neg().primitive_part());
    }
    if seq.last().and_then(IntPoly::degree) != Some(0) {
        return invalid(format!("{f} is not squarefree"));
    }
    let at_pos_inf: Vec<bool> = seq
        .iter()
        .map(|s| s.leading().unwrap().is_positive())
        .collect();
    let at_neg_inf: Vec<bool> = seq
        .iter()
        .map(|s| s.leading().unwrap().is_positive() ^ (s.degree().unwrap() % 2 == 1))
        .collect();
    Ok(sign_changes(&at_neg_inf) - sign_changes(&at_pos_inf))
}

fn sign_changes(signs: &[bool]) -> usize {
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Gcd of `f` and `g` over the rationals, as a primitive integer polynomial.
pub fn rational_gcd(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let mut a = f.primitive_part();
    let mut b = g.primitive_part();
    while !b.is_zero() {
        let r = a.signed_pseudo_rem(&b).primitive_part();
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    /// Brute-force degree pattern: strip off the smallest-degree monic divisor
    /// found by exhaustive enumeration, over and over.
    fn naive_degrees(f: &IntPoly, p: u64) -> Option<Vec<usize>> {
        let mut rest = f.reduce_mod(p).unwrap();
        let mut out = Vec::new();
        'outer: while rest.degree().unwrap() > 0 {
            let n = rest.degree().unwrap();
            for d in 1..=n / 2 {
                let total = p.pow(d as u32);
                for code in 0..total {
                    let mut c = Vec::with_capacity(d + 1);
                    let mut k = code;
                    for _ in 0..d {
                        c.push(k % p);
                        k /= p;
                    }
                    c.push(1);
                    let g = ModPoly::new(c, p).unwrap();
                    let (q, r) = rest.div_rem(&g);
                    if r.is_zero() {
                        if q.div_rem(&g).1.is_zero() {
                            return None;
                        }
                        out.push(d);
                        rest = q;
                        continue 'outer;
                    }
                }
            }
            out.push(n);
            break;
        }
        out.sort_unstable();
        Some(out)
    }

    #[test]
    fn spec_examples_factor_degrees() {
        let f = poly(&[1, 0, 1]);
        assert_eq!(
            factor_degrees(&f, 5).unwrap(),
            FactorDegrees::Squarefree(vec![1, 1])
        );
        assert_eq!(
            factor_degrees(&f, 3).unwrap(),
            FactorDegrees::Squarefree(vec![2])
        );
        assert_eq!(factor_degrees(&f, 2).unwrap(), FactorDegrees::NotSquarefree);
    }

    #[test]
    fn factor_degrees_rejects_bad_input() {
        assert!(factor_degrees(&IntPoly::zero(), 5).is_err());
        assert!(factor_degrees(&poly(&[1, 0, 2]), 5).is_err());
        assert!(factor_degrees(&poly(&[1, 0, 1]), 9).is_err());
    }

    #[test]
    fn agrees_with_naive_oracle() {
        let fields = [
            poly(&[1, 0, 1]),
            poly(&[-1, -1, 1]),
            poly(&[1, 1, 1, 1, 1]),
            poly(&[-2, 0, 0, 1]),
            poly(&[-1, -1, 0, 1]),
            poly(&[3, 0, 0, 0, -1, 1]),
        ];
        for f in &fields {
            for p in crate::arith::primes_up_to(50) {
                let expect = naive_degrees(f, p);
                let got = match factor_degrees(f, p).unwrap() {
                    FactorDegrees::Squarefree(d) => Some(d),
                    FactorDegrees::NotSquarefree => None,
                };
                assert_eq!(got, expect, "f = {f}, p = {p}");
            }
        }
    }

    #[test]
    fn bounded_variant_truncates() {
        // x^4 + x^3 + x^2 + x + 1 mod 2 is irreducible of degree 4
        let f = poly(&[1, 1, 1, 1, 1]);
        assert_eq!(
            factor_degrees_bounded(&f, 2, 1).unwrap(),
            PartialDegrees::Squarefree {
                degrees: vec![],
                unresolved: 4
            }
        );
        // mod 11 it splits completely
        assert_eq!(
            factor_degrees_bounded(&f, 11, 1).unwrap(),
            PartialDegrees::Squarefree {
                degrees: vec![1, 1, 1, 1],
                unresolved: 0
            }
        );
        // mod 19 (order 2) it is a product of two quadratics
        assert_eq!(
            factor_degrees_bounded(&f, 19, 1).unwrap(),
            PartialDegrees::Squarefree {
                degrees: vec![],
                unresolved: 4
            }
        );
    }

    #[test]
    fn discriminants() {
        assert_eq!(
            poly_discriminant(&poly(&[1, 0, 1])).unwrap(),
            BigInt::from(-4)
        );
        assert_eq!(
            poly_discriminant(&poly(&[-5, 0, 1])).unwrap(),
            BigInt::from(20)
        );
        assert_eq!(
            poly_discriminant(&poly(&[-2, 0, 0, 1])).unwrap(),
            BigInt::from(-108)
        );
        assert_eq!(
            poly_discriminant(&poly(&[-1, -1, 0, 1])).unwrap(),
            BigInt::from(-23)
        );
        assert!(poly_discriminant(&poly(&[3])).is_err());
    }

    #[test]
    fn discriminant_matches_root_product() {
        // disc = prod_{i<j} (a_i - a_j)^2 for f = prod (x - a_i)
        let roots = [-3i64, 0, 2, 7];
        let mut f = IntPoly::one();
        for r in roots {
            f = f.mul(&poly(&[-r, 1]));
        }
        let mut expect = BigInt::one();
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let d = BigInt::from(roots[i] - roots[j]);
                expect *= &d * &d;
            }
        }
        assert_eq!(poly_discriminant(&f).unwrap(), expect);
    }

    #[test]
    fn real_root_counts() {
        assert_eq!(count_real_roots(&poly(&[1, 0, 1])).unwrap(), 0);
        assert_eq!(count_real_roots(&poly(&[-5, 0, 1])).unwrap(), 2);
        assert_eq!(count_real_roots(&poly(&[-2, 0, 0, 1])).unwrap(), 1);
        assert_eq!(count_real_roots(&poly(&[1, 0, 0, 0, 1])).unwrap(), 0);
        // (x-1)(x-2)(x-3)(x+4)
        let f = [1i64, 2, 3, -4]
            .iter()
            .fold(IntPoly::one(), |acc, &r| acc.mul(&poly(&[-r, 1])));
        assert_eq!(count_real_roots(&f).unwrap(), 4);
        // repeated root
        assert!(count_real_roots(&poly(&[1, 2, 1])).is_err());
    }

    fn arb_monic(max_deg: usize) -> impl Strategy<Value = IntPoly> {
        (1..=max_deg).prop_flat_map(|n| {
            prop::collection::vec(-20i64..=20, n).prop_map(|mut c| {
                c.push(1);
                IntPoly::from_i64(&c)
            })
        })
    }

    proptest! {
        #[test]
        fn degrees_sum_to_n_when_unramified(f in arb_monic(6), idx in 0usize..15) {
            let p = crate::arith::primes_up_to(50)[idx];
            let n = f.degree().unwrap();
            let disc = poly_discriminant(&f).unwrap();
            prop_assume!(!disc.is_zero() && (&disc % BigInt::from(p)) != BigInt::zero());
            match factor_degrees(&f, p).unwrap() {
                FactorDegrees::Squarefree(d) => prop_assert_eq!(d.iter().sum::<usize>(), n),
                FactorDegrees::NotSquarefree => prop_assert!(false, "unramified prime reported ramified"),
            }
        }

        #[test]
        fn real_roots_parity(f in arb_monic(7)) {
            let g = rational_gcd(&f, &f.derivative());
            prop_assume!(g.degree() == Some(0));
            let r = count_real_roots(&f).unwrap();
            let n = f.degree().unwrap();
            prop_assert!(r <= n);
            prop_assert_eq!((n - r) % 2, 0);
        }

        #[test]
        fn discriminant_zero_iff_repeated_root(f in arb_monic(5), square in any::<bool>()) {
            let f = if square && f.degree().unwrap() <= 2 { f.mul(&f) } else { f };
            let disc = poly_discriminant(&f).unwrap();
            let g = rational_gcd(&f, &f.derivative());
            prop_assert_eq!(disc.is_zero(), g.degree().unwrap() > 0);
        }
    }
}
