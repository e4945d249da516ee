//! Brauer–Siegel ratios, the conjectured limits in terms of the invariants
//! `phi`, the logarithmic class number formula and family reports.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::family::{classify, Classification, FieldFamily, Generator, InvariantEstimate};
use crate::phi::{log_q_ratio, validate_finite, Phi};
use crate::quadratic::{ClassData, ClassMethod};
use crate::residue::{ResidueEstimate, ResidueMethod};
use crate::scalar::Real;

/// `1 + sum_q phi_q log(q/(q-1)) - phi_R log 2 - phi_C log 2 pi`.
pub fn conjectured_bs_limit<T: Real>(phi: &Phi<T>) -> Result<T> {
    phi.validate()?;
    let two = T::lit(2.0);
    Ok(T::one() + rho_sum(&phi.finite) - phi.real * two.ln() - phi.complex * (two * T::PI()).ln())
}

/// `sum_q phi_q log(q/(q-1))`.
pub fn conjectured_rho_limit<T: Real>(phi_q: &BTreeMap<u64, T>) -> Result<T> {
    validate_finite(phi_q)?;
    Ok(rho_sum(phi_q))
}

fn rho_sum<T: Real>(phi_q: &BTreeMap<u64, T>) -> T {
    phi_q
        .iter()
        .fold(T::zero(), |acc, (&q, &v)| acc + v * log_q_ratio::<T>(q))
}

/// `log(h R) / g`.
pub fn bs_ratio<T: Real>(h: u64, regulator: T, g: T) -> Result<T> {
    if !(g > T::zero()) {
        return invalid(format!("genus {g:?} must be positive"));
    }
    if h == 0 || !(regulator > T::zero()) {
        return invalid("h and R must be positive");
    }
    Ok((T::from_count(h) * regulator).ln() / g)
}

/// `|log(hR) - (log rho + log w + g - r1 log 2 - r2 log 2 pi)|`, which vanishes
/// exactly when `(h, R, w, rho)` satisfy the class number formula.
pub fn identity_residual<T: Real>(
    h: u64,
    regulator: T,
    w: u32,
    r1: usize,
    r2: usize,
    g: T,
    rho: T,
) -> T {
    let two = T::lit(2.0);
    let lhs = T::from_count(h).ln() + regulator.ln();
    let rhs = rho.ln() + T::from_count(u64::from(w)).ln() + g
        - T::from_count(r1 as u64) * two.ln()
        - T::from_count(r2 as u64) * (two * T::PI()).ln();
    (lhs - rhs).abs()
}

/// Slack allowed above the conjectured residue limit in the final ratio.
pub const TV_SANITY_SLACK: f64 = 0.1;

/// One row of a [`BSReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldRecord {
    pub label: String,
    pub n: usize,
    pub g: f64,
    pub rd: f64,
    pub log_rho_over_g: f64,
    /// Band on `log_rho_over_g` induced by the residue's error band.
    pub log_rho_over_g_band: f64,
    pub residue_method: ResidueMethod,
    pub log_hr_over_g: Option<f64>,
    pub identity_residual: Option<f64>,
    pub uncertain_primes: usize,
    pub discriminant_proxy: bool,
}

/// Per-field ratios plus conjectured targets for a family. Sequences and
/// point estimates only; no limit is asserted to exist.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BSReport {
    pub family_name: String,
    pub per_field: Vec<FieldRecord>,
    pub phi_hat: Phi<f64>,
    pub classification: Classification,
    /// Targets with `phi = 0` under bad evidence, otherwise the plug-in values.
    pub conjectured_bs: f64,
    pub conjectured_rho: f64,
    /// Targets evaluated at the point estimates `phi_hat`.
    pub plug_in_bs: f64,
    pub plug_in_rho: f64,
    /// Final `log rho / g` is at most `conjectured_rho + TV_SANITY_SLACK`.
    pub tv_sanity: bool,
    pub caveats: Vec<String>,
}

/// Assembles a [`BSReport`] from aligned per-field residues and optional class data.
pub fn convergence_report(
    family: &FieldFamily,
    inv: &InvariantEstimate,
    residues: &[ResidueEstimate],
    class_data: Option<&[ClassData]>,
) -> Result<BSReport> {
    let fields = family.fields();
    if residues.len() != fields.len() {
        return invalid(format!(
            "{} residues for {} fields",
            residues.len(),
            fields.len()
        ));
    }
    if let Some(cd) = class_data {
        if cd.len() != fields.len() {
            return invalid(format!(
                "{} class data records for {} fields",
                cd.len(),
                fields.len()
            ));
        }
    }
    if inv.n_over_g.len() != fields.len() {
        return invalid("invariant estimate does not match the family");
    }

    let mut per_field = Vec::with_capacity(fields.len());
    for (i, (k, res)) in fields.iter().zip(residues).enumerate() {
        if res.field_label != k.label() {
            return invalid(format!(
                "residue for {} given for {}",
                res.field_label,
                k.label()
            ));
        }
        let g = k.genus();
        if !(g > 0.0) {
            return invalid(format!("{} has genus 0", k.label()));
        }
        let (log_hr_over_g, residual) = match class_data {
            Some(cd) => {
                let c = &cd[i];
                if c.field_label != k.label() {
                    return invalid(format!(
                        "class data for {} given for {}",
                        c.field_label,
                        k.label()
                    ));
                }
                let ratio = bs_ratio(c.h, c.regulator, g)?;
                let r = identity_residual(c.h, c.regulator, c.w, k.r1(), k.r2(), g, res.rho);
                (Some(ratio), Some(r))
            }
            None => (None, None),
        };
        per_field.push(FieldRecord {
            label: k.label().to_string(),
            n: k.degree(),
            g,
            rd: k.root_discriminant(),
            log_rho_over_g: res.log_rho / g,
            log_rho_over_g_band: res.error_band / res.rho / g,
            residue_method: res.method,
            log_hr_over_g,
            identity_residual: residual,
            uncertain_primes: res.uncertain_prime_count,
            discriminant_proxy: k.is_discriminant_proxy(),
        });
    }

    let phi_hat = inv.phi_hat();
    let plug_in_bs = conjectured_bs_limit(&phi_hat)?;
    let plug_in_rho = conjectured_rho_limit(&phi_hat.finite)?;
    let classification = classify(family);
    let (conjectured_bs, conjectured_rho) =
        if classification == Classification::AsymptoticallyBadEvidence {
            (1.0, 0.0)
        } else {
            (plug_in_bs, plug_in_rho)
        };
    let tv_sanity = per_field
        .last()
        .is_some_and(|r| r.log_rho_over_g <= conjectured_rho + TV_SANITY_SLACK);

    let mut caveats = vec![
        "finite data: sequences and point estimates only; no limit is claimed".to_string(),
        format!(
            "classification is window-based heuristic evidence, not a proof ({})",
            inv.window.description
        ),
    ];
    if classification == Classification::AsymptoticallyBadEvidence {
        caveats.push("conjectured limits use phi = 0 (asymptotically bad evidence); plug-in values use phi_hat".into());
    }
    let proxies = per_field.iter().filter(|r| r.discriminant_proxy).count();
    if proxies > 0 {
        caveats.push(format!(
            "{proxies} field(s) use |disc(f)| as a discriminant proxy; their g is an upper bound and their ratios are biased toward 0"
        ));
    }
    let uncertain: usize = per_field.iter().map(|r| r.uncertain_primes).sum();
    if uncertain > 0 {
        caveats.push(format!(
            "{uncertain} unclassified ramified prime(s) contribute factor 1 to Euler residues"
        ));
    }
    if inv.finite.values().any(|s| s.lower_bound_only) {
        caveats.push("some N_q counts are lower bounds because of unclassified primes".into());
    }
    if residues
        .iter()
        .any(|r| r.method == ResidueMethod::TruncatedEuler)
    {
        caveats.push("truncated Euler residues carry heuristic error bands".into());
    }
    if class_data.is_some_and(|cd| {
        cd.iter()
            .any(|c| c.method == ClassMethod::ContinuedFractionAnalytic)
    }) {
        caveats.push("real quadratic class numbers are rounded from analytic L-values".into());
    }
    if matches!(family.generator(), Generator::UserList) {
        caveats
            .push("asymptotic exactness of a user-supplied list is assumed, not verified".into());
    }
    if !tv_sanity {
        caveats.push(format!(
            "final log rho/g exceeds conjectured rho limit by more than {TV_SANITY_SLACK}"
        ));
    }

    Ok(BSReport {
        family_name: family.name().to_string(),
        per_field,
        phi_hat,
        classification,
        conjectured_bs,
        conjectured_rho,
        plug_in_bs,
        plug_in_rho,
        tv_sanity,
        caveats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{LN_2, PI};

    fn finite(pairs: &[(u64, f64)]) -> BTreeMap<u64, f64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn bs_limit_examples() {
        assert_eq!(conjectured_bs_limit(&Phi::<f64>::zero()).unwrap(), 1.0);
        let phi = Phi::new(1.0, 0.0, BTreeMap::new()).unwrap();
        assert_abs_diff_eq!(
            conjectured_bs_limit(&phi).unwrap(),
            0.306_852_8,
            epsilon = 1e-7
        );
        let phi = Phi::new(0.0, 0.0, finite(&[(2, 0.5)])).unwrap();
        assert_abs_diff_eq!(
            conjectured_bs_limit(&phi).unwrap(),
            1.346_573_6,
            epsilon = 1e-7
        );
        let bad = Phi {
            real: 0.0,
            complex: 0.0,
            finite: finite(&[(6, 1.0)]),
        };
        assert!(conjectured_bs_limit(&bad).is_err());
    }

    #[test]
    fn rho_limit_examples() {
        assert_eq!(conjectured_rho_limit::<f64>(&BTreeMap::new()).unwrap(), 0.0);
        assert_abs_diff_eq!(
            conjectured_rho_limit(&finite(&[(2, 1.0)])).unwrap(),
            LN_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            conjectured_rho_limit(&finite(&[(3, 2.0)])).unwrap(),
            0.810_930_2,
            epsilon = 1e-7
        );
        assert!(conjectured_rho_limit(&finite(&[(12, 1.0)])).is_err());
        assert!(conjectured_rho_limit(&finite(&[(3, -1.0)])).is_err());
    }

    #[test]
    fn bs_ratio_examples() {
        assert_eq!(bs_ratio(1, 1.0, 3.7).unwrap(), 0.0);
        let r5 = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert_abs_diff_eq!(
            bs_ratio(1, r5, 0.5 * 5f64.ln()).unwrap(),
            -0.908_95,
            epsilon = 1e-5
        );
        assert_abs_diff_eq!(
            bs_ratio(3, 1.0, 0.5 * 23f64.ln()).unwrap(),
            0.700_76,
            epsilon = 1e-5
        );
        assert!(bs_ratio(1, 1.0, 0.0).is_err());
        assert!(bs_ratio(1, 1.0, -1.0).is_err());
    }

    #[test]
    fn identity_residual_examples() {
        let g = 0.5 * 4f64.ln();
        assert!(identity_residual(1, 1.0, 4, 0, 1, g, PI / 4.0) < 1e-12);
        let r5 = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        let rho5 = 2.0 * r5 / 5f64.sqrt();
        assert!(identity_residual(1, r5, 2, 2, 0, 0.5 * 5f64.ln(), rho5) < 1e-12);
        let perturbed = identity_residual(1, 1.0, 4, 0, 1, g, 1.01 * PI / 4.0);
        assert_abs_diff_eq!(perturbed, 1.01f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(perturbed, 0.00995, epsilon = 1e-5);
    }

    #[test]
    fn generic_over_f32() {
        let phi = Phi::<f32>::new(1.0, 0.0, BTreeMap::new()).unwrap();
        assert!((conjectured_bs_limit(&phi).unwrap() - 0.306_852_8).abs() < 1e-6);
    }

    fn phi_strategy() -> impl Strategy<Value = Phi<f64>> {
        let keys = prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 49, 101]);
        (
            0.0..2.0f64,
            0.0..2.0f64,
            prop::collection::btree_map(keys, 0.0..3.0f64, 0..6),
        )
            .prop_map(|(real, complex, finite)| Phi {
                real,
                complex,
                finite,
            })
    }

    proptest! {
        #[test]
        fn bs1_bs2_link(phi in phi_strategy()) {
            let link = conjectured_bs_limit(&phi).unwrap()
                - conjectured_rho_limit(&phi.finite).unwrap()
                - 1.0
                + phi.real * LN_2
                + phi.complex * (2.0 * PI).ln();
            prop_assert!(link.abs() < 1e-12);
        }

        #[test]
        fn bs_limit_monotone(phi in phi_strategy(), bump in 0.001..1.0f64, q in prop::sample::select(vec![2u64, 3, 4, 7, 9])) {
            let base = conjectured_bs_limit(&phi).unwrap();
            let mut up = phi.clone();
            *up.finite.entry(q).or_insert(0.0) += bump;
            prop_assert!(conjectured_bs_limit(&up).unwrap() > base);
            let mut real = phi.clone();
            real.real += bump;
            prop_assert!(conjectured_bs_limit(&real).unwrap() < base);
            let mut complex = phi;
            complex.complex += bump;
            prop_assert!(conjectured_bs_limit(&complex).unwrap() < base);
        }
    }
    mod report {
        use super::super::*;
        use crate::family::{estimate_phis, estimate_phis_with_profiles, family_profiles};
        use crate::numfield::make_quadratic;
        use crate::quadratic::{class_data, squarefree_part};
        use crate::residue::{
            residue_from_class_data, residue_quadratic_l, residue_truncated_euler,
        };
        use std::collections::BTreeSet;

        fn imaginary() -> FieldFamily {
            FieldFamily::from_generator(
                "imaginary",
                Generator::QuadraticSweep {
                    m_from: -60,
                    m_to: -1,
                },
            )
            .unwrap()
        }

        fn exact_inputs(f: &FieldFamily, l: bool) -> (Vec<ResidueEstimate>, Vec<ClassData>) {
            let mut res = Vec::new();
            let mut cds = Vec::new();
            for k in f.fields() {
                let d = k.quadratic_discriminant().unwrap();
                let cd = class_data(d, 100_000).unwrap();
                res.push(if l {
                    residue_quadratic_l(d, 1_000_000).unwrap()
                } else {
                    residue_from_class_data(
                        k.label(),
                        cd.h,
                        cd.regulator,
                        cd.w,
                        k.r1(),
                        k.r2(),
                        k.abs_discriminant(),
                    )
                    .unwrap()
                });
                cds.push(cd);
            }
            (res, cds)
        }

        #[test]
        fn imaginary_sweep_with_class_data() {
            let f = imaginary();
            let track: BTreeSet<u64> = [2, 3].into_iter().collect();
            let inv = estimate_phis(&f, &track, 100).unwrap();
            for l in [false, true] {
                let (res, cds) = exact_inputs(&f, l);
                let rep = convergence_report(&f, &inv, &res, Some(&cds)).unwrap();
                assert_eq!(
                    rep.classification,
                    Classification::AsymptoticallyBadEvidence
                );
                assert_eq!(rep.conjectured_bs, 1.0);
                assert_eq!(rep.conjectured_rho, 0.0);
                assert!(rep.tv_sanity);
                for r in &rep.per_field {
                    assert!(r.identity_residual.unwrap() < 1e-9, "{}", r.label);
                    assert!(r.log_hr_over_g.is_some());
                }
            }
        }

        #[test]
        fn optional_class_data_and_alignment() {
            let f = imaginary();
            let inv = estimate_phis(&f, &BTreeSet::new(), 100).unwrap();
            let (res, cds) = exact_inputs(&f, false);
            let rep = convergence_report(&f, &inv, &res, None).unwrap();
            assert!(rep
                .per_field
                .iter()
                .all(|r| r.log_hr_over_g.is_none() && r.identity_residual.is_none()));
            assert!(convergence_report(&f, &inv, &res[1..], None).is_err());
            assert!(convergence_report(&f, &inv, &res, Some(&cds[1..])).is_err());
            let mut swapped = res.clone();
            swapped.swap(0, 1);
            assert!(convergence_report(&f, &inv, &swapped, None).is_err());
        }

        #[test]
        fn cyclotomic_tower_euler_residues() {
            let f = FieldFamily::from_generator(
                "cyc",
                Generator::CyclotomicTower {
                    prime: 2,
                    k_from: 2,
                    k_to: 5,
                },
            )
            .unwrap();
            let profiles = family_profiles(&f, 20_000).unwrap();
            let inv =
                estimate_phis_with_profiles(&f, &[2].into_iter().collect(), &profiles).unwrap();
            let res: Vec<_> = f
                .fields()
                .iter()
                .zip(&profiles)
                .map(|(k, p)| residue_truncated_euler(k, p, 20_000).unwrap())
                .collect();
            let rep = convergence_report(&f, &inv, &res, None).unwrap();
            assert_eq!(rep.conjectured_rho, 0.0);
            assert!(rep.tv_sanity);
            assert!(rep
                .caveats
                .iter()
                .any(|c| c.contains("heuristic error bands")));
            assert!(rep.per_field.iter().all(|r| r.log_rho_over_g_band >= 0.0));
        }

        #[test]
        fn real_quadratic_residual_from_l_values() {
            for m in [2i64, 3, 5, 6, 7, 10, 13, 79, 94] {
                let k = make_quadratic(m).unwrap();
                let d = k.quadratic_discriminant().unwrap();
                assert_eq!(squarefree_part(d), m);
                let cd = class_data(d, 1_000_000).unwrap();
                let l = residue_quadratic_l(d, 1_000_000).unwrap();
                let r =
                    identity_residual(cd.h, cd.regulator, cd.w, k.r1(), k.r2(), k.genus(), l.rho);
                assert!(r < 1e-9, "m = {m}: {r}");
            }
        }
    }
}
