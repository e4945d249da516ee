//! Class numbers, fundamental units and `L(1, chi_D)` for quadratic fields.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_squarefree, isqrt};
use crate::error::{invalid, Error, Result};
use crate::numfield::quadratic_label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassMethod {
    ReducedForms,
    #[serde(rename = "continued-fraction+analytic")]
    ContinuedFractionAnalytic,
    UserSupplied,
}

/// `(h, R, w)` for a field, natural-log regulator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassData {
    pub field_label: String,
    pub h: u64,
    pub regulator: f64,
    pub w: u32,
    pub method: ClassMethod,
}

/// Fundamental unit `(x + y sqrt(D)) / 2 > 1` and its norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub x: BigInt,
    pub y: BigInt,
    pub norm: i8,
}

/// `L(1, chi_D)` with a heuristic error band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LValue {
    pub value: f64,
    pub error_band: f64,
    pub cutoff: u64,
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => d != 1 && is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Fundamental discriminants in `[from, to]`, ascending.
pub fn fundamental_discriminants(from: i64, to: i64) -> Vec<i64> {
    (from..=to)
        .filter(|&d| is_fundamental_discriminant(d))
        .collect()
}

/// Squarefree `m` with `Q(sqrt(m))` of discriminant `d`.
pub fn squarefree_part(d: i64) -> i64 {
    if d.rem_euclid(4) == 0 {
        d / 4
    } else {
        d
    }
}

pub fn field_label(d: i64) -> String {
    quadratic_label(squarefree_part(d))
}

fn check_fundamental(d: i64) -> Result<()> {
    if is_fundamental_discriminant(d) {
        Ok(())
    } else {
        invalid(format!("{d} is not a fundamental discriminant"))
    }
}

/// Kronecker symbol `(a / n)` for any integer `a`, `n >= 0`.
pub fn kronecker(a: i64, n: u64) -> i8 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let e = n.trailing_zeros();
    let odd = n >> e;
    let mut sign = 1i8;
    if e > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if matches!(a.rem_euclid(8), 3 | 5) && e % 2 == 1 {
            sign = -1;
        }
    }
    sign * jacobi(a.rem_euclid(odd as i64) as u64, odd)
}

/// Jacobi symbol for odd `n`.
fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut t = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// The quadratic character `chi_D(n) = (D / n)` of a fundamental discriminant.
pub fn kronecker_symbol(d: i64, n: u64) -> Result<i8> {
    check_fundamental(d)?;
    Ok(kronecker(d, n))
}

pub fn roots_of_unity(d: i64) -> u32 {
    match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// Reduced primitive forms `(a, b, c)` of discriminant `d < 0`:
/// `|b| <= a <= c`, and `b >= 0` whenever `|b| = a` or `a = c`.
pub fn reduced_forms(d: i64) -> Result<Vec<(i64, i64, i64)>> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return invalid(format!("{d} is not a negative discriminant"));
    }
    let n = -d;
    let mut out = Vec::new();
    let mut b = n % 2;
    while 3 * b * b <= n {
        let ac = (b * b + n) / 4;
        let mut a = b.max(1);
        while a * a <= ac {
            if ac % a == 0 {
                let c = ac / a;
                if a.gcd(&b).gcd(&c) == 1 {
                    out.push((a, b, c));
                    if b != 0 && a != b && a != c {
                        out.push((a, -b, c));
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    out.sort_unstable();
    Ok(out)
}

fn reduced_form_count(d: i64) -> u64 {
    let n = -d;
    let mut count = 0;
    let mut b = n % 2;
    while 3 * b * b <= n {
        let ac = (b * b + n) / 4;
        let mut a = b.max(1);
        while a * a <= ac {
            if ac % a == 0 {
                let c = ac / a;
                if a.gcd(&b).gcd(&c) == 1 {
                    count += if b == 0 || a == b || a == c { 1 } else { 2 };
                }
            }
            a += 1;
        }
        b += 2;
    }
    count
}

/// Class number of `Q(sqrt(D))`, `D < 0`, by counting reduced forms.
pub fn class_number_imaginary(d: i64) -> Result<ClassData> {
    if d >= 0 {
        return invalid(format!("{d} is not negative"));
    }
    check_fundamental(d)?;
    Ok(ClassData {
        field_label: field_label(d),
        h: reduced_form_count(d),
        regulator: 1.0,
        w: roots_of_unity(d),
        method: ClassMethod::ReducedForms,
    })
}

/// Fundamental unit of `Q(sqrt(D))`, `D > 0`, from the continued fraction
/// of the ring generator `sqrt(D/4)` or `(1 + sqrt(D))/2`.
///
/// The first convergent `A/B` with `N(A - B w) = +-1` yields the unit; all
/// arithmetic is on exact integers.
pub fn fundamental_unit(d: i64) -> Result<FundamentalUnit> {
    if d <= 0 {
        return invalid(format!("{d} is not positive"));
    }
    check_fundamental(d)?;
    let (radicand, p0, q0, trace, norm) = if d % 4 == 0 {
        let m = d / 4;
        (m, 0i64, 1i64, 0i64, -m)
    } else {
        (d, 1, 2, 1, (1 - d) / 4)
    };
    let s = isqrt(radicand as u64) as i64;
    let (mut p, mut q) = (p0, q0);
    let (mut a1, mut a2) = (BigInt::one(), BigInt::zero());
    let (mut b1, mut b2) = (BigInt::zero(), BigInt::one());
    let (trace, norm) = (BigInt::from(trace), BigInt::from(norm));
    loop {
        let a = (p + s) / q;
        let ab = BigInt::from(a);
        let num = &ab * &a1 + &a2;
        let den = &ab * &b1 + &b2;
        let n = &num * &num - &num * &den * &trace + &den * &den * &norm;
        if n.abs().is_one() {
            let x = if d % 4 == 0 {
                &num * 2
            } else {
                &num * 2 - &den
            };
            return Ok(FundamentalUnit {
                x,
                y: den,
                norm: if n.is_positive() { 1 } else { -1 },
            });
        }
        a2 = std::mem::replace(&mut a1, num);
        b2 = std::mem::replace(&mut b1, den);
        p = a * q - p;
        q = (radicand - p * p) / q;
    }
}

impl FundamentalUnit {
    /// `log epsilon` in natural units.
    pub fn log(&self) -> f64 {
        let n = f64::from(self.norm);
        match self.x.to_f64() {
            Some(x) if x < 1e15 => ((x + (x * x - 4.0 * n).sqrt()) / 2.0).ln(),
            _ => {
                let bits = self.x.bits();
                let shift = bits.saturating_sub(64);
                let top = (&self.x >> shift).to_f64().expect("64-bit mantissa");
                top.ln() + shift as f64 * std::f64::consts::LN_2
            }
        }
    }
}

/// `R = log epsilon_D` for `D > 0`.
pub fn fundamental_unit_regulator(d: i64) -> Result<f64> {
    Ok(fundamental_unit(d)?.log())
}

/// Terms of the periodic tail expansion kept before truncation.
const TAIL_TERMS: usize = 8;

/// `L(1, chi_D)` from partial sums with a periodic-tail correction.
///
/// With `k = |D|` the sum is taken to `N`, the largest multiple of `k` not
/// above `cutoff`. Over each later period, `sum_a chi(a)/(M + a)` expands in
/// powers of `1/M` with coefficients `S_j = sum_a chi(a) a^j` (`S_0 = 0`), and
/// the resulting sums over `M = N, N + k, ...` are evaluated by Euler–Maclaurin.
/// The band is the size of the first omitted term plus a rounding allowance.
pub fn dirichlet_l1(d: i64, cutoff: u64) -> Result<LValue> {
    check_fundamental(d)?;
    let k = d.unsigned_abs();
    if cutoff < 10 * k {
        return invalid(format!("cutoff {cutoff} below 10|D| = {}", 10 * k));
    }
    let chi: Vec<f64> = (0..k).map(|a| f64::from(kronecker(d, a))).collect();
    let periods = cutoff / k;
    let n_end = periods * k;

    let mut partial = 0.0;
    for block in 0..periods {
        let base = (block * k) as f64;
        let mut s = 0.0;
        for (a, &c) in chi.iter().enumerate().skip(1) {
            if c != 0.0 {
                s += c / (base + a as f64);
            }
        }
        // last residue class a = k has chi = 0
        partial += s;
    }

    let kf = k as f64;
    let nf = n_end as f64;
    let moment = |j: i32| -> f64 {
        chi.iter()
            .enumerate()
            .skip(1)
            .map(|(a, &c)| c * (a as f64 / kf).powi(j))
            .sum::<f64>()
            * kf.powi(j)
    };
    let mut tail = 0.0;
    let mut band = 0.0;
    for j in 1..=TAIL_TERMS + 1 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let s_j = moment(j as i32);
        let (z, z_band) = hurwitz_tail(nf, kf, (j + 1) as i32);
        if j <= TAIL_TERMS {
            tail += sign * s_j * z;
            band += (s_j * z_band).abs();
        } else {
            band += (s_j * z).abs();
        }
    }
    band += 8.0 * f64::EPSILON * (1.0 + nf.ln()) * (periods as f64).sqrt();
    Ok(LValue {
        value: partial + tail,
        error_band: band,
        cutoff: n_end,
    })
}

/// `sum_{m >= 0} (n + m k)^{-s}` for `n >> k` by Euler–Maclaurin through
/// `B_8`, with the magnitude of the `B_10` term as the second component.
fn hurwitz_tail(n: f64, k: f64, s: i32) -> (f64, f64) {
    // B_{2i} / (2i)!
    const COEFFS: [f64; 5] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
    ];
    let sf = f64::from(s);
    let mut value = n.powi(1 - s) / (k * (sf - 1.0)) + 0.5 * n.powi(-s);
    let mut last = 0.0;
    for (i, c) in COEFFS.iter().enumerate() {
        let r = 2 * i as i32 + 1;
        let rising: f64 = (0..r).map(|t| sf + f64::from(t)).product();
        let term = c * rising * k.powi(r) * n.powi(-s - r);
        if i + 1 < COEFFS.len() {
            value += term;
        } else {
            last = term.abs();
        }
    }
    (value, last)
}

/// Largest distance from an integer tolerated before rounding `h`.
pub const ROUNDING_MARGIN: f64 = 0.1;

/// Class number of `Q(sqrt(D))`, `D > 0`, as `round(sqrt(D) L(1, chi_D) / (2R))`.
pub fn class_number_real(d: i64, cutoff: u64) -> Result<ClassData> {
    if d <= 0 {
        return invalid(format!("{d} is not positive"));
    }
    let l = dirichlet_l1(d, cutoff)?;
    let regulator = fundamental_unit_regulator(d)?;
    let analytic = (d as f64).sqrt() * l.value / (2.0 * regulator);
    let h = analytic.round();
    if (analytic - h).abs() > ROUNDING_MARGIN || h < 1.0 {
        return Err(Error::InsufficientCutoff(format!(
            "analytic class number {analytic} for D = {d} is not near an integer"
        )));
    }
    Ok(ClassData {
        field_label: field_label(d),
        h: h as u64,
        regulator,
        w: 2,
        method: ClassMethod::ContinuedFractionAnalytic,
    })
}

/// Class data for either sign of `D`.
pub fn class_data(d: i64, cutoff: u64) -> Result<ClassData> {
    if d < 0 {
        class_number_imaginary(d)
    } else {
        class_number_real(d, cutoff)
    }
}

/// `L(1, chi_D)` from the finite closed forms, for test oracles:
/// `-pi/|D|^{3/2} sum chi(a) a` for `D < 0` and
/// `-1/sqrt(D) sum chi(a) log sin(pi a / D)` for `D > 0`.
#[doc(hidden)]
pub fn l1_closed_form(d: i64) -> f64 {
    let k = d.unsigned_abs();
    let kf = k as f64;
    if d < 0 {
        let s: f64 = (1..k).map(|a| f64::from(kronecker(d, a)) * a as f64).sum();
        -PI * s / kf.powf(1.5)
    } else {
        let s: f64 = (1..k)
            .map(|a| f64::from(kronecker(d, a)) * (PI * a as f64 / kf).sin().ln())
            .sum();
        -s / kf.sqrt()
    }
}
