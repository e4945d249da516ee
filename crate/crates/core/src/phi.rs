//! Tsfasman–Vlăduţ invariant vectors.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::splitting::check_prime_powers;

/// `(phi_R, phi_C, {phi_q})` for a family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phi<T> {
    pub real: T,
    pub complex: T,
    /// Keyed by prime power `q`.
    pub finite: BTreeMap<u64, T>,
}

impl<T: Real> Phi<T> {
    pub fn zero() -> Self {
        Self {
            real: T::zero(),
            complex: T::zero(),
            finite: BTreeMap::new(),
        }
    }

    pub fn new(real: T, complex: T, finite: BTreeMap<u64, T>) -> Result<Self> {
        let phi = Self {
            real,
            complex,
            finite,
        };
        phi.validate()?;
        Ok(phi)
    }

    pub fn validate(&self) -> Result<()> {
        check_prime_powers(self.finite.keys())?;
        validate_finite(&self.finite)?;
        for (name, v) in [("phi_R", self.real), ("phi_C", self.complex)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return invalid(format!("{name} = {v:?} must be finite and nonnegative"));
            }
        }
        Ok(())
    }

    /// Every component is zero: the asymptotically bad case.
    pub fn is_zero(&self) -> bool {
        self.real.is_zero() && self.complex.is_zero() && self.finite.values().all(|v| v.is_zero())
    }
}

pub(crate) fn validate_finite<T: Real>(finite: &BTreeMap<u64, T>) -> Result<()> {
    check_prime_powers(finite.keys())?;
    for (q, &v) in finite {
        if !(v >= T::zero()) || !v.is_finite() {
            return invalid(format!("phi_{q} = {v:?} must be finite and nonnegative"));
        }
    }
    Ok(())
}

/// `log(q / (q - 1))`.
pub fn log_q_ratio<T: Real>(q: u64) -> T {
    -(-T::one() / T::from_count(q)).ln_1p()
}
