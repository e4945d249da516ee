//! Splitting statistics `N_q(K)` and the Chebyshev-type function `G_K(x)`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{max_exponent, prime_power, primes_up_to};
use crate::error::{invalid, Result};
use crate::numfield::NumberField;
use crate::polyarith::{factor_degrees_bounded, PartialDegrees};

/// Number of places of each prime-power norm up to `q_max`.
///
/// Only nonzero counts are stored; [`SplittingProfile::count`] reports zero
/// for the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingProfile {
    field_label: String,
    degree: usize,
    q_max: u64,
    counts: BTreeMap<u64, u64>,
    uncertain_primes: BTreeSet<u64>,
}

impl SplittingProfile {
    pub fn field_label(&self) -> &str {
        &self.field_label
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn q_max(&self) -> u64 {
        self.q_max
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// `N_q`; zero for unrecorded `q`.
    pub fn count(&self, q: u64) -> u64 {
        self.counts.get(&q).copied().unwrap_or(0)
    }

    pub fn uncertain_primes(&self) -> &BTreeSet<u64> {
        &self.uncertain_primes
    }

    pub fn is_uncertain(&self, p: u64) -> bool {
        self.uncertain_primes.contains(&p)
    }

    /// `G_K(x) = sum over places v and m >= 1 with Nv^m <= x of log Nv`.
    ///
    /// Refuses profiles with uncertain primes, whose counts are only lower bounds.
    pub fn chebyshev_g(&self, x: f64) -> Result<f64> {
        if !self.uncertain_primes.is_empty() {
            return invalid(format!(
                "profile of {} has {} uncertain primes; G_K would be a lower bound",
                self.field_label,
                self.uncertain_primes.len()
            ));
        }
        self.chebyshev_g_lower_bound(x)
    }

    /// As [`Self::chebyshev_g`], accepting uncertain primes (the result is then a lower bound).
    pub fn chebyshev_g_lower_bound(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return invalid(format!("x = {x} must be at least 1"));
        }
        if x > self.q_max as f64 {
            return invalid(format!(
                "profile covers q <= {}, asked for x = {x}",
                self.q_max
            ));
        }
        let limit = x.floor() as u64;
        Ok(self
            .counts
            .range(..=limit)
            .map(|(&q, &n)| n as f64 * max_exponent(q, limit) as f64 * (q as f64).ln())
            .sum())
    }
}

impl Serialize for SplittingProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SplittingProfile", 4)?;
        st.serialize_field("field", &self.field_label)?;
        st.serialize_field("q_max", &self.q_max)?;
        // integer keys serialize as decimal strings, ascending
        st.serialize_field("counts", &self.counts)?;
        st.serialize_field("uncertain", &self.uncertain_primes)?;
        st.end()
    }
}

enum Local {
    Degrees(Vec<usize>),
    Uncertain,
}

/// Places of norm `q <= q_max`, from the factor degrees of the defining
/// polynomial modulo each prime (Dedekind), with closed-form ramification
/// data where `f mod p` has repeated factors.
///
/// Primes are processed in parallel on the current rayon pool; the merge is
/// in ascending prime order.
pub fn splitting_counts(k: &NumberField, q_max: u64) -> Result<SplittingProfile> {
    if q_max < 2 {
        return invalid(format!("q_max = {q_max} must be at least 2"));
    }
    let f = k.defining_poly();
    let primes = primes_up_to(q_max);
    let locals: Vec<Local> = primes
        .par_iter()
        .map(|&p| {
            let max_deg = max_exponent(p, q_max) as usize;
            match factor_degrees_bounded(f, p, max_deg).expect("monic defining polynomial") {
                PartialDegrees::Squarefree { degrees, .. } => Local::Degrees(degrees),
                PartialDegrees::NotSquarefree => match k.known_places_above(p) {
                    Some(d) => Local::Degrees(d),
                    None => Local::Uncertain,
                },
            }
        })
        .collect();

    let mut counts = BTreeMap::new();
    let mut uncertain = BTreeSet::new();
    for (&p, local) in primes.iter().zip(locals) {
        match local {
            Local::Degrees(degrees) => {
                for d in degrees {
                    if let Some(q) = p.checked_pow(d as u32).filter(|&q| q <= q_max) {
                        *counts.entry(q).or_insert(0) += 1;
                    }
                }
            }
            Local::Uncertain => {
                uncertain.insert(p);
            }
        }
    }
    Ok(SplittingProfile {
        field_label: k.label().to_string(),
        degree: k.degree(),
        q_max,
        counts,
        uncertain_primes: uncertain,
    })
}

/// `G_K(x)` for a field, checking the profile belongs to it.
pub fn chebyshev_g(k: &NumberField, x: f64, profile: &SplittingProfile) -> Result<f64> {
    if profile.field_label != k.label() {
        return invalid(format!(
            "profile is for {}, not {}",
            profile.field_label,
            k.label()
        ));
    }
    profile.chebyshev_g(x)
}

/// Checks that every key is a prime power.
pub fn check_prime_powers<'a>(keys: impl IntoIterator<Item = &'a u64>) -> Result<()> {
    for &q in keys {
        if prime_power(q).is_none() {
            return invalid(format!("{q} is not a prime power"));
        }
    }
    Ok(())
}
