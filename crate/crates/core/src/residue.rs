//! Residue of `zeta_K` at `s = 1` by the class number formula and by
//! truncated Euler products, and reconciliation of the two.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{ln_biguint, primes_up_to};
use crate::error::{invalid, Result};
use crate::numfield::NumberField;
use crate::quadratic::{dirichlet_l1, field_label};
use crate::splitting::SplittingProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidueMethod {
    ClassNumberFormula,
    TruncatedEuler,
    QuadraticL,
}

/// Value of `rho_K` with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidueEstimate {
    #[serde(rename = "field")]
    pub field_label: String,
    pub rho: f64,
    pub log_rho: f64,
    pub method: ResidueMethod,
    /// 0 for exact methods.
    pub cutoff: u64,
    pub error_band: f64,
    #[serde(rename = "uncertain_primes")]
    pub uncertain_prime_count: usize,
}

/// `rho = 2^{r1} (2 pi)^{r2} h R / (w sqrt(d_K))`.
pub fn residue_from_class_data(
    field_label: &str,
    h: u64,
    regulator: f64,
    w: u32,
    r1: usize,
    r2: usize,
    d_k: &BigUint,
) -> Result<ResidueEstimate> {
    if h == 0 || !(regulator > 0.0) || w == 0 || d_k.is_zero() {
        return invalid("h, R, w and d_K must be positive");
    }
    let log_rho = r1 as f64 * LN_2 + r2 as f64 * (2.0 * PI).ln() + (h as f64).ln() + regulator.ln()
        - f64::from(w).ln()
        - 0.5 * ln_biguint(d_k);
    Ok(ResidueEstimate {
        field_label: field_label.to_string(),
        rho: log_rho.exp(),
        log_rho,
        method: ResidueMethod::ClassNumberFormula,
        cutoff: 0,
        error_band: 0.0,
        uncertain_prime_count: 0,
    })
}

/// Smallest Euler cutoff accepted.
pub const MIN_EULER_CUTOFF: u64 = 100;

/// Partial products of the local ratios of `zeta_K / zeta` at `s = 1`:
/// `prod_{p <= X} (1 - 1/p) prod_{v | p, Nv <= X} (1 - 1/Nv)^{-1}`.
///
/// The estimate averages the partial products at `X` and `X/2`; the band is
/// half their difference. Uncertain primes contribute a factor of one.
pub fn residue_truncated_euler(
    k: &NumberField,
    profile: &SplittingProfile,
    cutoff: u64,
) -> Result<ResidueEstimate> {
    if profile.field_label() != k.label() {
        return invalid(format!(
            "profile is for {}, not {}",
            profile.field_label(),
            k.label()
        ));
    }
    if cutoff < MIN_EULER_CUTOFF {
        return invalid(format!("Euler cutoff {cutoff} below {MIN_EULER_CUTOFF}"));
    }
    if profile.q_max() < cutoff {
        return invalid(format!(
            "profile covers q <= {}, Euler cutoff is {cutoff}",
            profile.q_max()
        ));
    }
    let half = cutoff / 2;
    let log_at = |x: u64| -> f64 {
        let mut total = 0.0;
        for p in primes_up_to(x) {
            if profile.is_uncertain(p) {
                continue;
            }
            let mut local = (-1.0 / p as f64).ln_1p();
            let mut q = p;
            while q <= x {
                let n = profile.count(q);
                if n > 0 {
                    local -= n as f64 * (-1.0 / q as f64).ln_1p();
                }
                match q.checked_mul(p) {
                    Some(next) => q = next,
                    None => break,
                }
            }
            total += local;
        }
        total
    };
    let full = log_at(cutoff);
    let halved = log_at(half);
    let (hi, lo) = if full >= halved {
        (full, halved)
    } else {
        (halved, full)
    };
    // log of the mean of exp(full) and exp(halved), without overflow
    let log_rho = hi + ((lo - hi).exp() + 1.0).ln() - LN_2;
    let error_band = 0.5 * hi.exp() * (1.0 - (lo - hi).exp());
    let uncertain = profile.uncertain_primes().range(..=cutoff).count();
    Ok(ResidueEstimate {
        field_label: k.label().to_string(),
        rho: log_rho.exp(),
        log_rho,
        method: ResidueMethod::TruncatedEuler,
        cutoff,
        error_band,
        uncertain_prime_count: uncertain,
    })
}

/// `rho_K = L(1, chi_D)` for a quadratic field of discriminant `D`.
pub fn residue_quadratic_l(d: i64, cutoff: u64) -> Result<ResidueEstimate> {
    let l = dirichlet_l1(d, cutoff)?;
    Ok(ResidueEstimate {
        field_label: field_label(d),
        rho: l.value,
        log_rho: l.value.ln(),
        method: ResidueMethod::QuadraticL,
        cutoff: l.cutoff,
        error_band: l.error_band,
        uncertain_prime_count: 0,
    })
}

/// Comparison of two estimates for the same field.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reconciliation {
    pub field: String,
    pub rho_a: f64,
    pub rho_b: f64,
    pub relative_difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `|a - b| / max(a, b)` against a tolerance.
pub fn reconcile(
    a: &ResidueEstimate,
    b: &ResidueEstimate,
    tolerance: f64,
) -> Result<Reconciliation> {
    if a.field_label != b.field_label {
        return invalid(format!(
            "estimates for {} and {}",
            a.field_label, b.field_label
        ));
    }
    let rel = (a.rho - b.rho).abs() / a.rho.max(b.rho);
    Ok(Reconciliation {
        field: a.field_label.clone(),
        rho_a: a.rho,
        rho_b: b.rho,
        relative_difference: rel,
        tolerance,
        pass: rel <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{make_quadratic, make_rationals};
    use crate::quadratic::{class_data, fundamental_unit_regulator};
    use crate::splitting::splitting_counts;
    use approx::assert_abs_diff_eq;

    fn formula(h: u64, r: f64, w: u32, r1: usize, r2: usize, d: u32) -> f64 {
        residue_from_class_data("K", h, r, w, r1, r2, &BigUint::from(d))
            .unwrap()
            .rho
    }

    #[test]
    fn class_number_formula_examples() {
        assert_abs_diff_eq!(formula(1, 1.0, 4, 0, 1, 4), PI / 4.0, epsilon = 1e-15);
        let r = fundamental_unit_regulator(5).unwrap();
        assert_abs_diff_eq!(
            formula(1, r, 2, 2, 0, 5),
            0.430_408_940_964_004,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(formula(1, 1.0, 2, 1, 0, 1), 1.0, epsilon = 1e-15);
        assert!(residue_from_class_data("K", 0, 1.0, 2, 1, 0, &BigUint::from(1u32)).is_err());
        assert!(residue_from_class_data("K", 1, -1.0, 2, 1, 0, &BigUint::from(1u32)).is_err());
    }

    #[test]
    fn rationals_have_unit_residue() {
        let q = make_rationals();
        let prof = splitting_counts(&q, 5000).unwrap();
        for x in [100, 1000, 5000] {
            let est = residue_truncated_euler(&q, &prof, x).unwrap();
            assert_eq!(est.rho, 1.0);
            assert_eq!(est.error_band, 0.0);
        }
    }

    #[test]
    fn euler_product_quadratic() {
        let k = make_quadratic(-1).unwrap();
        let prof = splitting_counts(&k, 100_000).unwrap();
        let est = residue_truncated_euler(&k, &prof, 100_000).unwrap();
        assert!((est.rho - PI / 4.0).abs() / (PI / 4.0) < 0.02);
        assert_eq!(est.method, ResidueMethod::TruncatedEuler);

        let k = make_quadratic(5).unwrap();
        let prof = splitting_counts(&k, 100_000).unwrap();
        let est = residue_truncated_euler(&k, &prof, 100_000).unwrap();
        assert!((est.rho - 0.4304).abs() / 0.4304 < 0.02);
    }

    #[test]
    fn euler_preconditions() {
        let k = make_quadratic(-1).unwrap();
        let prof = splitting_counts(&k, 1000).unwrap();
        assert!(residue_truncated_euler(&k, &prof, 50).is_err());
        assert!(residue_truncated_euler(&k, &prof, 2000).is_err());
        let other = make_quadratic(2).unwrap();
        assert!(residue_truncated_euler(&other, &prof, 500).is_err());
    }

    #[test]
    fn formula_matches_l_value() {
        for d in crate::quadratic::fundamental_discriminants(-200, 200) {
            let cd = class_data(d, 100_000).unwrap();
            let m = crate::quadratic::squarefree_part(d);
            let k = make_quadratic(m).unwrap();
            let exact = residue_from_class_data(
                k.label(),
                cd.h,
                cd.regulator,
                cd.w,
                k.r1(),
                k.r2(),
                k.abs_discriminant(),
            )
            .unwrap();
            let l = residue_quadratic_l(d, 100_000).unwrap();
            assert_eq!(l.field_label, exact.field_label);
            assert!((exact.rho - l.rho).abs() <= l.error_band + 1e-12, "D = {d}");
        }
    }

    #[test]
    fn reconcile_examples() {
        let a = residue_from_class_data("Q(i)", 1, 1.0, 4, 0, 1, &BigUint::from(4u32)).unwrap();
        let mut b = a.clone();
        b.rho = 0.7841;
        let r = reconcile(&a, &b, 0.02).unwrap();
        assert!(r.pass);
        assert_abs_diff_eq!(r.relative_difference, 0.001_655, epsilon = 1e-5);
        assert_eq!(reconcile(&a, &a, 0.02).unwrap().relative_difference, 0.0);
        b.rho = 0.70;
        assert!(!reconcile(&a, &b, 0.02).unwrap().pass);
        b.field_label = "other".into();
        assert!(reconcile(&a, &b, 0.02).is_err());
    }

    #[test]
    fn serializes_with_wire_names() {
        let a = residue_from_class_data("Q(i)", 1, 1.0, 4, 0, 1, &BigUint::from(4u32)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&a).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            vec![
                "cutoff",
                "error_band",
                "field",
                "log_rho",
                "method",
                "rho",
                "uncertain_primes"
            ]
        );
        assert_eq!(v["method"], "class-number-formula");
    }
}
