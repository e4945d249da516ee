//! Explicit constants and bound formulas around zero-free regions, residues
//! and regulators.
//!
//! Murty's constant `c` and Stark's constant `c'` are not pinned down in the
//! literature; they are parameters here (default 1) and callers report the
//! values used.

use serde::Serialize;

use crate::arith::factorize;
use crate::bs::{conjectured_bs_limit, conjectured_rho_limit};
use crate::error::{invalid, Result};
use crate::phi::Phi;
use crate::scalar::Real;

/// `e(n)`: the largest exponent in the prime factorization of `n >= 2`.
pub fn e_of_n(n: u64) -> Result<u32> {
    if n < 2 {
        return invalid(format!("e(n) is undefined for n = {n}"));
    }
    Ok(factorize(n).iter().map(|&(_, e)| e).max().unwrap_or(0))
}

/// `delta(n) = (e + 1)^2 3^{1/3} 12^{e - 1}` with `e = e(n)`.
pub fn delta_of_n<T: Real>(n: u64) -> Result<T> {
    Ok(delta_from_e(e_of_n(n)?))
}

fn delta_from_e<T: Real>(e: u32) -> T {
    let ef = T::from_count(u64::from(e));
    let three = T::lit(3.0);
    (ef + T::one()).powi(2) * three.cbrt() * T::lit(12.0).powi(e as i32 - 1)
}

/// Parameters of the zero-free region for fields of degree `n` with solvable closure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolvableBoundParams<T> {
    pub n: u64,
    pub e_n: u32,
    pub delta_n: T,
    /// Murty's absolute constant.
    pub c: T,
    /// Stark's effective constant.
    pub c_prime: T,
}

impl<T: Real> SolvableBoundParams<T> {
    pub fn new(n: u64, c: T, c_prime: T) -> Result<Self> {
        if !(c > T::zero()) || !(c_prime > T::zero()) {
            return invalid("constants c and c' must be positive");
        }
        let e_n = e_of_n(n)?;
        Ok(Self {
            n,
            e_n,
            delta_n: delta_from_e(e_n),
            c,
            c_prime,
        })
    }

    pub fn with_defaults(n: u64) -> Result<Self> {
        Self::new(n, T::one(), T::one())
    }
}

/// Which size measure of `K` the width formula divides by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WidthScale {
    /// `log d_K`, as in the statement of the zero-free region.
    LogDiscriminant,
    /// `g_K = (1/2) log d_K`, as in the comparison with the exceptional-zero floor.
    Genus,
}

/// `c / (n^{e(n)} delta(n) log d_K)`: width of the region below 1 where a real
/// zero of `zeta_K` forces a zero of a quadratic subfield.
pub fn zero_free_width<T: Real>(params: &SolvableBoundParams<T>, log_dk: T) -> Result<T> {
    zero_free_width_scaled(params, log_dk, WidthScale::LogDiscriminant)
}

/// [`zero_free_width`] with an explicit choice of size measure.
pub fn zero_free_width_scaled<T: Real>(
    params: &SolvableBoundParams<T>,
    size: T,
    scale: WidthScale,
) -> Result<T> {
    if !(size > T::zero()) {
        return invalid(format!("{scale:?} = {size:?} must be positive"));
    }
    let n = T::from_count(params.n);
    Ok(params.c / (n.powi(params.e_n as i32) * params.delta_n * size))
}

/// `c0 = 2 (3 + 2 sqrt 2) / (5 + sqrt 5) = 1.61...`.
pub fn c0<T: Real>() -> T {
    let two = T::lit(2.0);
    two * (T::lit(3.0) + two * two.sqrt()) / (T::lit(5.0) + T::lit(5.0).sqrt())
}

/// `1 - 1/(c0 g)`: no exceptional zero lies at or above this point except possibly one.
pub fn exceptional_zero_floor<T: Real>(g: T) -> Result<T> {
    if !(g * c0::<T>() > T::one()) {
        return invalid(format!("g = {g:?} must exceed 1/c0"));
    }
    Ok(T::one() - T::one() / (c0::<T>() * g))
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if !(beta >= T::lit(0.5) && beta < T::one()) {
        return invalid(format!("beta = {beta:?} outside [1/2, 1)"));
    }
    Ok(())
}

/// `c' (1 - beta)`; absent an exceptional zero take `beta = 1/2`.
pub fn stark_lower_bound<T: Real>(beta: T, c_prime: T) -> Result<T> {
    check_beta(beta)?;
    if !(c_prime > T::zero()) {
        return invalid("c' must be positive");
    }
    Ok(c_prime * (T::one() - beta))
}

/// `(1 - beta) (e g / (2n))^n`.
pub fn louboutin_upper_bound<T: Real>(beta: T, g: T, n: u64) -> Result<T> {
    check_beta(beta)?;
    if !(g > T::zero()) || n == 0 {
        return invalid("g and n must be positive");
    }
    let base = T::E() * g / (T::lit(2.0) * T::from_count(n));
    Ok((T::one() - beta) * base.powi(n as i32))
}

/// `(log sqrt(pi e) + gamma/2) phi_R + (log 2 + gamma) phi_C`.
pub fn regulator_liminf_bound<T: Real>(phi_r: T, phi_c: T) -> Result<T> {
    if !(phi_r >= T::zero() && phi_c >= T::zero()) {
        return invalid("phi values must be nonnegative");
    }
    let half = T::lit(0.5);
    let gamma = T::euler_gamma();
    let real_coeff = half * (T::PI() * T::E()).ln() + half * gamma;
    let complex_coeff = T::LN_2() + gamma;
    Ok(real_coeff * phi_r + complex_coeff * phi_c)
}

/// `1 - (log 2 sqrt(pi) + (gamma+1)/2) phi_R - (log 4 pi + gamma) phi_C + sum_q phi_q log(q/(q-1))`.
pub fn tv_class_number_limsup<T: Real>(phi: &Phi<T>) -> Result<T> {
    phi.validate()?;
    let half = T::lit(0.5);
    let gamma = T::euler_gamma();
    let real_coeff = T::LN_2() + half * T::PI().ln() + half * (gamma + T::one());
    let complex_coeff = (T::lit(4.0) * T::PI()).ln() + gamma;
    Ok(
        T::one() - real_coeff * phi.real - complex_coeff * phi.complex
            + conjectured_rho_limit(&phi.finite)?,
    )
}

/// `log(g/n) / (g/n)`, the shape of the conditional convergence rate.
pub fn grh_rate<T: Real>(g: T, n: u64) -> Result<T> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let x = g / T::from_count(n);
    if !(x > T::one()) {
        return invalid(format!("g/n = {x:?} must exceed 1"));
    }
    Ok(x.ln() / x)
}

/// The two conjectured limits are tied by the class number formula; this is
/// their difference after accounting for the archimedean terms (zero up to rounding).
pub fn bs1_bs2_consistency<T: Real>(phi: &Phi<T>) -> Result<T> {
    let bs = conjectured_bs_limit(phi)?;
    let rho = conjectured_rho_limit(&phi.finite)?;
    let two_pi = T::lit(2.0) * T::PI();
    Ok(bs - T::one() - rho + phi.real * T::LN_2() + phi.complex * two_pi.ln())
}

/// One row of the bounds table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsRow {
    pub n: u64,
    pub e: u32,
    pub delta: f64,
    pub zero_free_width: f64,
}

/// Rows `n = 2..=n_max` at a reference `log d_K`.
pub fn bounds_table(n_max: u64, log_dk: f64, c: f64) -> Result<Vec<BoundsRow>> {
    if n_max < 2 {
        return invalid(format!("n_max = {n_max} must be at least 2"));
    }
    (2..=n_max)
        .map(|n| {
            let params = SolvableBoundParams::new(n, c, 1.0)?;
            Ok(BoundsRow {
                n,
                e: params.e_n,
                delta: params.delta_n,
                zero_free_width: zero_free_width(&params, log_dk)?,
            })
        })
        .collect()
}
