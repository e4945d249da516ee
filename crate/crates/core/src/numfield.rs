//! Number fields `K = Q[x]/(f)` with their signature, discriminant and genus.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{self, euler_phi, factorize, is_squarefree, ln_biguint, multiplicative_order};
use crate::error::{invalid, Error, Result};
use crate::polyarith::{
    count_real_roots, factor_degrees, poly_discriminant, FactorDegrees, IntPoly,
};

/// Where the stored field discriminant came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscriminantSource {
    ClosedFormula,
    UserSupplied,
    /// `|disc(f)|`, an upper bound for `d_K` (they differ by a square).
    PolyDiscUpperProxy,
}

/// Built-in family a field belongs to; drives closed-form ramification data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    /// `Q(sqrt(m))` with fundamental discriminant `disc`.
    Quadratic {
        m: i64,
        disc: i64,
    },
    Cyclotomic {
        n: u64,
    },
    PureCubic {
        m: u64,
    },
    User,
}

#[derive(Clone, Debug)]
pub struct NumberField {
    label: String,
    defining_poly: IntPoly,
    degree: usize,
    r1: usize,
    r2: usize,
    abs_discriminant: BigUint,
    discriminant_source: DiscriminantSource,
    genus: f64,
    kind: FieldKind,
}

impl NumberField {
    fn build(
        label: String,
        defining_poly: IntPoly,
        r1: usize,
        abs_discriminant: BigUint,
        discriminant_source: DiscriminantSource,
        kind: FieldKind,
    ) -> Self {
        let degree = defining_poly
            .degree()
            .expect("nonconstant defining polynomial");
        debug_assert!(r1 <= degree && (degree - r1).is_multiple_of(2));
        let genus = 0.5 * ln_biguint(&abs_discriminant);
        Self {
            label,
            defining_poly,
            degree,
            r1,
            r2: (degree - r1) / 2,
            abs_discriminant,
            discriminant_source,
            genus,
            kind,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn defining_poly(&self) -> &IntPoly {
        &self.defining_poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn r1(&self) -> usize {
        self.r1
    }

    pub fn r2(&self) -> usize {
        self.r2
    }

    pub fn abs_discriminant(&self) -> &BigUint {
        &self.abs_discriminant
    }

    pub fn discriminant_source(&self) -> DiscriminantSource {
        self.discriminant_source
    }

    /// `g_K = log sqrt(d_K)`.
    pub fn genus(&self) -> f64 {
        self.genus
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn is_discriminant_proxy(&self) -> bool {
        self.discriminant_source == DiscriminantSource::PolyDiscUpperProxy
    }

    /// Fundamental discriminant when the field is quadratic.
    pub fn quadratic_discriminant(&self) -> Option<i64> {
        match self.kind {
            FieldKind::Quadratic { disc, .. } => Some(disc),
            _ => None,
        }
    }

    /// `d_K^{1/n} = exp(2 g_K / n)`.
    pub fn root_discriminant(&self) -> f64 {
        (2.0 * self.genus / self.degree as f64).exp()
    }

    /// Residue degrees of the places above a prime where `f mod p` is not
    /// squarefree, when the field's family determines them in closed form.
    pub fn known_places_above(&self, p: u64) -> Option<Vec<usize>> {
        match self.kind {
            FieldKind::Rational => Some(vec![1]),
            FieldKind::Quadratic { disc, .. } => Some(match crate::quadratic::kronecker(disc, p) {
                0 => vec![1],
                1 => vec![1, 1],
                _ => vec![2],
            }),
            FieldKind::Cyclotomic { n } => {
                let mut m = n;
                while m % p == 0 {
                    m /= p;
                }
                let f = multiplicative_order(p, m);
                let count = euler_phi(m) / f;
                Some(vec![f as usize; count as usize])
            }
            FieldKind::PureCubic { m } => {
                if m % p == 0 {
                    Some(vec![1])
                } else if p == 3 {
                    // 3 is totally ramified unless m = +-1 mod 9, where 3 = P^2 Q
                    Some(if (m * m) % 9 == 1 {
                        vec![1, 1]
                    } else {
                        vec![1]
                    })
                } else {
                    None
                }
            }
            FieldKind::User => None,
        }
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

/// The field of rationals, defined by `x`.
pub fn make_rationals() -> NumberField {
    NumberField::build(
        "Q".into(),
        IntPoly::from_i64(&[0, 1]),
        1,
        BigUint::one(),
        DiscriminantSource::ClosedFormula,
        FieldKind::Rational,
    )
}

pub fn quadratic_label(m: i64) -> String {
    format!("Q(sqrt({m}))")
}

/// `Q(sqrt(m))` for squarefree `m ∉ {0, 1}`.
///
/// The defining polynomial is the minimal polynomial of the ring-of-integers
/// generator, so `disc(f)` equals the field discriminant.
pub fn make_quadratic(m: i64) -> Result<NumberField> {
    if m == 0 || m == 1 || !is_squarefree(m) {
        return invalid(format!("m = {m} must be squarefree and not 0 or 1"));
    }
    let (poly, disc) = if m.rem_euclid(4) == 1 {
        (IntPoly::from_i64(&[(1 - m) / 4, -1, 1]), m)
    } else {
        (IntPoly::from_i64(&[-m, 0, 1]), 4 * m)
    };
    Ok(NumberField::build(
        quadratic_label(m),
        poly,
        if m > 0 { 2 } else { 0 },
        BigUint::from(disc.unsigned_abs()),
        DiscriminantSource::ClosedFormula,
        FieldKind::Quadratic { m, disc },
    ))
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> IntPoly {
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut num = IntPoly::one();
    let mut den = IntPoly::one();
    for &d in &divisors {
        match mobius(n / d) {
            1 => num = num.mul(&IntPoly::x_pow_minus_one(d as usize)),
            -1 => den = den.mul(&IntPoly::x_pow_minus_one(d as usize)),
            _ => {}
        }
    }
    // the denominator has leading coefficient +-1; normalize to monic
    if den.leading().is_some_and(Signed::is_negative) {
        den = den.neg();
        num = num.neg();
    }
    num.div_exact_monic(&den)
        .expect("cyclotomic division is exact")
}

fn mobius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `Q(zeta_n)`; `n = 2 mod 4` is normalized to `n/2`.
pub fn make_cyclotomic(n: u64) -> Result<NumberField> {
    if n < 3 {
        return invalid(format!("cyclotomic conductor {n} < 3"));
    }
    let n = if n % 4 == 2 { n / 2 } else { n };
    if n < 3 {
        return invalid("conductor normalizes to Q");
    }
    let phi = euler_phi(n);
    let mut disc = BigUint::from(n).pow(phi as u32);
    for (p, _) in factorize(n) {
        disc /= BigUint::from(p).pow((phi / (p - 1)) as u32);
    }
    Ok(NumberField::build(
        format!("Q(zeta_{n})"),
        cyclotomic_polynomial(n),
        0,
        disc,
        DiscriminantSource::ClosedFormula,
        FieldKind::Cyclotomic { n },
    ))
}

/// `Q(m^{1/3})` for squarefree `m >= 2`.
pub fn make_pure_cubic(m: u64) -> Result<NumberField> {
    if m < 2 || !is_squarefree(m as i64) {
        return invalid(format!("m = {m} must be squarefree and at least 2"));
    }
    let m2 = BigUint::from(m) * BigUint::from(m);
    let disc = if (&m2 % 9u32).is_one() {
        m2 * 3u32
    } else {
        m2 * 27u32
    };
    Ok(NumberField::build(
        format!("Q({m}^(1/3))"),
        IntPoly::new(vec![
            -BigInt::from(m),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::one(),
        ]),
        1,
        disc,
        DiscriminantSource::ClosedFormula,
        FieldKind::PureCubic { m },
    ))
}

/// Candidate factors tried before giving up on an irreducibility proof.
pub const IRREDUCIBILITY_EFFORT: u64 = 2_000_000;
const CERTIFICATE_PRIMES: usize = 200;

/// A field from a user polynomial, with an optional known discriminant.
///
/// Without `d_k` the polynomial discriminant stands in as a flagged proxy.
pub fn make_user_field(
    f: &IntPoly,
    d_k: Option<BigUint>,
    label: Option<String>,
) -> Result<NumberField> {
    let Some(n) = f.degree() else {
        return invalid("zero polynomial");
    };
    if n == 0 || !f.is_monic() {
        return invalid(format!("{f} must be monic of positive degree"));
    }
    verify_irreducible(f)?;
    let r1 = count_real_roots(f)?;
    let pdisc = poly_discriminant(f)?;
    let abs_pdisc = pdisc.magnitude().clone();
    let (disc, source) = match d_k {
        Some(d) => {
            if d.is_zero() {
                return invalid("field discriminant must be positive");
            }
            let (q, r) = abs_pdisc.div_rem(&d);
            if !r.is_zero() || !is_perfect_square(&q) {
                return invalid(format!(
                    "|disc(f)| = {abs_pdisc} is not a square multiple of d_K = {d}"
                ));
            }
            (d, DiscriminantSource::UserSupplied)
        }
        None => (abs_pdisc, DiscriminantSource::PolyDiscUpperProxy),
    };
    if n >= 2 && disc < BigUint::from(3u32) {
        return invalid("d_K must be at least 3 for a proper extension");
    }
    let label = label.unwrap_or_else(|| format!("Q[x]/({f})"));
    Ok(NumberField::build(
        label,
        f.clone(),
        r1,
        disc,
        source,
        FieldKind::User,
    ))
}

fn is_perfect_square(x: &BigUint) -> bool {
    let r = x.sqrt();
    &(&r * &r) == x
}

/// Bounded-effort irreducibility proof over the rationals.
///
/// Degrees of possible rational factors are first pruned by the factor-degree
/// patterns modulo small primes; surviving degrees are ruled out by trying
/// every monic integer candidate inside the Mignotte coefficient bound.
pub fn verify_irreducible(f: &IntPoly) -> Result<()> {
    let n = f.degree().expect("nonzero");
    if n == 1 {
        return Ok(());
    }
    let coeffs = f.coeffs();
    if coeffs[0].is_zero() {
        return Err(Error::InvalidInput(format!("{f} is divisible by x")));
    }

    // possible[d]: a rational factor of degree d is still conceivable
    let mut possible = vec![true; n + 1];
    let mut filter_prime = None;
    for p in arith::first_primes(CERTIFICATE_PRIMES) {
        let FactorDegrees::Squarefree(degs) = factor_degrees(f, p)? else {
            continue;
        };
        filter_prime.get_or_insert(p);
        let mut sums = vec![false; n + 1];
        sums[0] = true;
        for d in degs {
            for s in (d..=n).rev() {
                sums[s] |= sums[s - d];
            }
        }
        for d in 1..n {
            possible[d] &= sums[d];
        }
        if (1..n).all(|d| !possible[d]) {
            return Ok(());
        }
    }

    let a0 = coeffs[0].magnitude().clone();
    let norm = f.l2_norm();
    let candidates: Vec<usize> = (1..=n / 2)
        .filter(|&d| possible[d] || possible[n - d])
        .collect();
    let mut effort = 0u64;
    for &d in &candidates {
        let bounds: Vec<i64> = (0..d)
            .map(|j| (binomial(d, j) * norm).floor().min(1e15) as i64)
            .collect();
        let cost = bounds
            .iter()
            .try_fold(1u64, |acc, &b| acc.checked_mul(2 * b as u64 + 1));
        match cost {
            Some(c) if effort + c <= IRREDUCIBILITY_EFFORT => effort += c,
            _ => {
                return Err(Error::IrreducibilityUnverified(format!(
                    "search for a degree-{d} factor of {f} exceeds the effort bound"
                )))
            }
        }
        if let Some(g) = find_factor(f, d, &bounds, &a0, filter_prime) {
            return invalid(format!("{f} is reducible: divisible by {g}"));
        }
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn find_factor(
    f: &IntPoly,
    d: usize,
    bounds: &[i64],
    a0: &BigUint,
    filter_prime: Option<u64>,
) -> Option<IntPoly> {
    let fp = filter_prime.map(|p| (p, f.reduce_mod(p).expect("prime")));
    let mut digits: Vec<i64> = bounds.iter().map(|&b| -b).collect();
    loop {
        let c0 = digits[0];
        let divides_a0 = c0 != 0 && (a0 % BigUint::from(c0.unsigned_abs())).is_zero();
        if divides_a0 {
            let mut c: Vec<BigInt> = digits.iter().map(|&v| BigInt::from(v)).collect();
            c.push(BigInt::one());
            let g = IntPoly::new(c);
            let passes_filter = fp.as_ref().is_none_or(|(p, fp)| {
                let gp = g.reduce_mod(*p).expect("prime");
                fp.rem(&gp).is_zero()
            });
            if passes_filter && f.div_exact_monic(&g).is_some() {
                return Some(g);
            }
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == d {
                return None;
            }
            if digits[k] < bounds[k] {
                digits[k] += 1;
                break;
            }
            digits[k] = -bounds[k];
            k += 1;
        }
    }
}
