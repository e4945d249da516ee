//! Ordered families and towers of number fields, estimates of the
//! Tsfasman–Vlăduţ invariants and heuristic classification.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{first_primes, is_squarefree};
use crate::error::{invalid, Result};
use crate::numfield::{
    make_cyclotomic, make_pure_cubic, make_quadratic, make_user_field, NumberField,
};
use crate::phi::Phi;
use crate::polyarith::IntPoly;
use crate::splitting::{check_prime_powers, splitting_counts, SplittingProfile};

/// How a family was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "generator", content = "params", rename_all = "kebab-case")]
pub enum Generator {
    /// `Q(sqrt(m))` for squarefree `m` in `[m_from, m_to]`, ordered by `d_K`.
    QuadraticSweep {
        m_from: i64,
        m_to: i64,
    },
    /// `Q(zeta_{p^k})` for `k` in `[k_from, k_to]`.
    CyclotomicTower {
        prime: u64,
        k_from: u32,
        k_to: u32,
    },
    /// `Q(m^{1/3})` for squarefree `m` in `[m_from, m_to]`, ordered by `d_K`.
    PureCubicSweep {
        m_from: u64,
        m_to: u64,
    },
    /// `Q(p_i^{1/3})` for the first `n_primes` primes.
    CubeRootCompositumBound {
        n_primes: usize,
    },
    UserList,
}

impl Generator {
    /// Whether the generator produces a chain of inclusions.
    pub fn is_tower(&self) -> bool {
        matches!(self, Generator::CyclotomicTower { .. })
    }

    pub fn generate(&self) -> Result<Vec<NumberField>> {
        match *self {
            Generator::QuadraticSweep { m_from, m_to } => {
                let mut fields = (m_from..=m_to)
                    .filter(|&m| m != 0 && m != 1 && is_squarefree(m))
                    .map(make_quadratic)
                    .collect::<Result<Vec<_>>>()?;
                fields.sort_by(|a, b| a.abs_discriminant().cmp(b.abs_discriminant()));
                Ok(fields)
            }
            Generator::CyclotomicTower {
                prime,
                k_from,
                k_to,
            } => {
                if k_from > k_to {
                    return invalid("empty cyclotomic range");
                }
                (k_from..=k_to)
                    .map(|k| match prime.checked_pow(k) {
                        Some(n) => make_cyclotomic(n),
                        None => invalid(format!("{prime}^{k} overflows")),
                    })
                    .collect()
            }
            Generator::PureCubicSweep { m_from, m_to } => {
                let mut fields = (m_from.max(2)..=m_to)
                    .filter(|&m| is_squarefree(m as i64))
                    .map(make_pure_cubic)
                    .collect::<Result<Vec<_>>>()?;
                fields.sort_by(|a, b| a.abs_discriminant().cmp(b.abs_discriminant()));
                Ok(fields)
            }
            Generator::CubeRootCompositumBound { n_primes } => first_primes(n_primes)
                .into_iter()
                .map(make_pure_cubic)
                .collect(),
            Generator::UserList => invalid("a user list carries its own fields"),
        }
    }
}

/// An ordered sequence of distinct number fields.
#[derive(Clone, Debug)]
pub struct FieldFamily {
    name: String,
    fields: Vec<NumberField>,
    is_tower: bool,
    generator: Generator,
}

impl FieldFamily {
    /// Checks label distinctness and, for towers, strict growth of degree and genus.
    pub fn new(
        name: impl Into<String>,
        fields: Vec<NumberField>,
        is_tower: bool,
        generator: Generator,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for k in &fields {
            if !seen.insert(k.label()) {
                return invalid(format!(
                    "field {} appears twice; family members must be distinct",
                    k.label()
                ));
            }
        }
        if is_tower {
            for pair in fields.windows(2) {
                if pair[1].degree() <= pair[0].degree() || pair[1].genus() <= pair[0].genus() {
                    return invalid(format!(
                        "tower step {} -> {} does not increase degree and genus",
                        pair[0].label(),
                        pair[1].label()
                    ));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            fields,
            is_tower,
            generator,
        })
    }

    pub fn from_generator(name: impl Into<String>, generator: Generator) -> Result<Self> {
        let fields = generator.generate()?;
        let is_tower = generator.is_tower();
        Self::new(name, fields, is_tower, generator)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn fields(&self) -> &[NumberField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn is_tower(&self) -> bool {
        self.is_tower
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }
}

/// An integer literal in a family file: a JSON number or a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum IntLiteral {
    Small(i64),
    Text(String),
}

impl IntLiteral {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            IntLiteral::Small(v) => Ok(BigInt::from(*v)),
            IntLiteral::Text(s) => s
                .trim()
                .parse()
                .or_else(|_| invalid(format!("not an integer: {s:?}"))),
        }
    }
}

/// One user field: coefficients lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct FieldSpec {
    pub poly: Vec<IntLiteral>,
    #[serde(rename = "d_K", default)]
    pub d_k: Option<IntLiteral>,
    #[serde(default)]
    pub label: Option<String>,
}

/// Parsed family file.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum FamilySpec {
    Listed {
        name: String,
        fields: Vec<FieldSpec>,
        #[serde(default)]
        is_tower: bool,
    },
    Generated {
        name: String,
        #[serde(flatten)]
        generator: Generator,
        #[serde(default)]
        is_tower: Option<bool>,
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<FieldFamily> {
        match self {
            FamilySpec::Listed {
                name,
                fields,
                is_tower,
            } => {
                let fields = fields
                    .iter()
                    .map(|spec| {
                        let coeffs = spec
                            .poly
                            .iter()
                            .map(IntLiteral::to_bigint)
                            .collect::<Result<Vec<_>>>()?;
                        let d_k = match &spec.d_k {
                            None => None,
                            Some(lit) => match lit.to_bigint()?.to_biguint() {
                                Some(d) => Some(d),
                                None => return invalid("d_K must be positive"),
                            },
                        };
                        make_user_field(&IntPoly::new(coeffs), d_k, spec.label.clone())
                    })
                    .collect::<Result<Vec<_>>>()?;
                FieldFamily::new(name.clone(), fields, *is_tower, Generator::UserList)
            }
            FamilySpec::Generated {
                name,
                generator,
                is_tower,
            } => {
                let fields = generator.generate()?;
                let tower = is_tower.unwrap_or_else(|| generator.is_tower());
                FieldFamily::new(name.clone(), fields, tower, generator.clone())
            }
        }
    }
}

/// A ratio tracked along a family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSeries {
    pub values: Vec<f64>,
    /// The final term.
    pub estimate: f64,
    /// Largest successive difference inside the window.
    pub diagnostic: f64,
    /// Some numerator was only a lower bound because of unclassified primes.
    pub lower_bound_only: bool,
}

impl RatioSeries {
    fn new(values: Vec<f64>, window_start: usize, lower_bound_only: bool) -> Self {
        let estimate = *values.last().expect("nonempty series");
        let diagnostic = values[window_start..]
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        Self {
            values,
            estimate,
            diagnostic,
            lower_bound_only,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EstimateWindow {
    pub first: usize,
    pub last: usize,
    pub description: String,
}

/// Ratios `r1/g`, `r2/g`, `N_q/g` along a family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantEstimate {
    pub real: RatioSeries,
    pub complex: RatioSeries,
    pub finite: BTreeMap<u64, RatioSeries>,
    pub n_over_g: Vec<f64>,
    pub window: EstimateWindow,
}

impl InvariantEstimate {
    /// Point estimates `(phi_R, phi_C, {phi_q})`.
    pub fn phi_hat(&self) -> Phi<f64> {
        Phi {
            real: self.real.estimate,
            complex: self.complex.estimate,
            finite: self.finite.iter().map(|(&q, s)| (q, s.estimate)).collect(),
        }
    }
}

/// Splitting profiles for every member, computed in parallel.
pub fn family_profiles(family: &FieldFamily, q_max: u64) -> Result<Vec<SplittingProfile>> {
    family
        .fields
        .par_iter()
        .map(|k| splitting_counts(k, q_max))
        .collect()
}

pub fn estimate_phis(
    family: &FieldFamily,
    q_track: &BTreeSet<u64>,
    q_max: u64,
) -> Result<InvariantEstimate> {
    check_prime_powers(q_track)?;
    if let Some(&q) = q_track.iter().next_back() {
        if q > q_max {
            return invalid(format!("tracked q = {q} exceeds q_max = {q_max}"));
        }
    }
    let profiles = family_profiles(family, q_max)?;
    estimate_phis_with_profiles(family, q_track, &profiles)
}

/// [`estimate_phis`] with precomputed profiles aligned with the family.
pub fn estimate_phis_with_profiles(
    family: &FieldFamily,
    q_track: &BTreeSet<u64>,
    profiles: &[SplittingProfile],
) -> Result<InvariantEstimate> {
    check_prime_powers(q_track)?;
    let len = family.len();
    if len < 2 {
        return invalid(format!(
            "estimating invariants needs at least 2 fields, got {len}"
        ));
    }
    if profiles.len() != len {
        return invalid(format!("{} profiles for {len} fields", profiles.len()));
    }
    let mut genera = Vec::with_capacity(len);
    for (k, prof) in family.fields.iter().zip(profiles) {
        if prof.field_label() != k.label() {
            return invalid(format!(
                "profile for {} given for {}",
                prof.field_label(),
                k.label()
            ));
        }
        if let Some(&q) = q_track.iter().next_back() {
            if q > prof.q_max() {
                return invalid(format!("profile of {} stops below q = {q}", k.label()));
            }
        }
        let g = k.genus();
        if !(g > 0.0) {
            return invalid(format!("{} has genus 0", k.label()));
        }
        genera.push(g);
    }

    let window_len = len.div_ceil(3).max(2);
    let start = len - window_len;
    let ratio =
        |num: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..len).map(|i| num(i) / genera[i]).collect() };

    let real = RatioSeries::new(ratio(&|i| family.fields[i].r1() as f64), start, false);
    let complex = RatioSeries::new(ratio(&|i| family.fields[i].r2() as f64), start, false);
    let n_over_g = ratio(&|i| family.fields[i].degree() as f64);
    let mut finite = BTreeMap::new();
    for &q in q_track {
        let p = crate::arith::prime_power(q).expect("checked prime power").0;
        let lower = profiles.iter().any(|prof| prof.is_uncertain(p));
        let values = ratio(&|i| profiles[i].count(q) as f64);
        finite.insert(q, RatioSeries::new(values, start, lower));
    }
    Ok(InvariantEstimate {
        real,
        complex,
        finite,
        n_over_g,
        window: EstimateWindow {
            first: start,
            last: len - 1,
            description: format!(
                "point estimate = term {len} of {len}; diagnostic over terms {}..={len}",
                start + 1
            ),
        },
    })
}

/// Heuristic evidence about asymptotic behavior. Never a proof.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    AsymptoticallyBadEvidence,
    AsymptoticallyGoodEvidence,
    Undetermined,
}

/// Relative band width used to call `n/g` stable.
pub const GOOD_BAND: f64 = 0.1;

/// Looks at the last `ceil(|F|/2)` fields: strictly increasing root
/// discriminant with strictly decreasing `n/g` is bad evidence; `n/g` inside
/// a band of relative width [`GOOD_BAND`] is good evidence. Families with
/// fewer than 3 fields, or containing `Q`, are undetermined.
pub fn classify(family: &FieldFamily) -> Classification {
    let len = family.len();
    if len < 3 || family.fields.iter().any(|k| !(k.genus() > 0.0)) {
        return Classification::Undetermined;
    }
    let window = &family.fields[len - len.div_ceil(2)..];
    let rd: Vec<f64> = window.iter().map(NumberField::root_discriminant).collect();
    let n_g: Vec<f64> = window
        .iter()
        .map(|k| k.degree() as f64 / k.genus())
        .collect();
    let rd_up = rd.windows(2).all(|w| w[1] > w[0]);
    let ng_down = n_g.windows(2).all(|w| w[1] < w[0]);
    if rd_up && ng_down {
        return Classification::AsymptoticallyBadEvidence;
    }
    let lo = n_g.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = n_g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    if center > 0.0 && hi - lo <= GOOD_BAND * center {
        Classification::AsymptoticallyGoodEvidence
    } else {
        Classification::Undetermined
    }
}

/// `2 / eps`: if `n/g >= eps` along a family, quadratic subfields of its
/// members have genus at most this.
pub fn quadratic_subfield_genus_bound(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return invalid(format!("eps = {eps} must be positive"));
    }
    Ok(2.0 / eps)
}

/// Running maximum of `rd(Q(p_i^{1/3}))` over the first `k` primes, for
/// `k = 1..=n_primes`. Each term bounds the root discriminant of
/// `Q(2^{1/3}, ..., p_k^{1/3})` from below.
pub fn cube_root_rd_lower_bound(n_primes: usize) -> Result<Vec<f64>> {
    if n_primes == 0 {
        return invalid("need at least one prime");
    }
    let mut best = 0.0f64;
    first_primes(n_primes)
        .into_iter()
        .map(|p| {
            best = best.max(make_pure_cubic(p)?.root_discriminant());
            Ok(best)
        })
        .collect()
}

/// Discriminant of a family member as an exact integer.
pub fn member_discriminants(family: &FieldFamily) -> Vec<BigUint> {
    family
        .fields
        .iter()
        .map(|k| k.abs_discriminant().clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cyclo_tower() -> FieldFamily {
        FieldFamily::from_generator(
            "2-power cyclotomic",
            Generator::CyclotomicTower {
                prime: 2,
                k_from: 2,
                k_to: 7,
            },
        )
        .unwrap()
    }

    fn imaginary_sweep() -> FieldFamily {
        FieldFamily::from_generator(
            "imaginary",
            Generator::QuadraticSweep {
                m_from: -100,
                m_to: -1,
            },
        )
        .unwrap()
    }

    #[test]
    fn generators() {
        let t = cyclo_tower();
        assert!(t.is_tower());
        assert_eq!(
            t.fields()
                .iter()
                .map(NumberField::degree)
                .collect::<Vec<_>>(),
            vec![2, 4, 8, 16, 32, 64]
        );
        let s = imaginary_sweep();
        assert!(!s.is_tower());
        assert_eq!(s.fields()[0].label(), "Q(sqrt(-3))");
        assert_eq!(s.fields().last().unwrap().label(), "Q(sqrt(-97))");
        assert!(s
            .fields()
            .windows(2)
            .all(|w| w[0].abs_discriminant() <= w[1].abs_discriminant()));
        let c = FieldFamily::from_generator(
            "cubes",
            Generator::CubeRootCompositumBound { n_primes: 3 },
        )
        .unwrap();
        assert_eq!(c.len(), 3);
        let p = FieldFamily::from_generator(
            "pure",
            Generator::PureCubicSweep {
                m_from: 2,
                m_to: 12,
            },
        )
        .unwrap();
        assert_eq!(p.len(), 7);
    }

    #[test]
    fn distinctness_and_tower_checks() {
        let k = make_quadratic(-1).unwrap();
        let err = FieldFamily::new(
            "dup",
            vec![k.clone(), k.clone()],
            false,
            Generator::UserList,
        )
        .unwrap_err();
        assert!(err.to_string().contains("distinct"));
        let a = make_quadratic(-5).unwrap();
        assert!(FieldFamily::new(
            "flat",
            vec![k.clone(), a.clone()],
            true,
            Generator::UserList
        )
        .is_err());
        assert!(FieldFamily::new("flat", vec![k, a], false, Generator::UserList).is_ok());
    }

    #[test]
    fn tower_ratios_vanish() {
        let t = cyclo_tower();
        let track: BTreeSet<u64> = [2, 3, 5, 9].into_iter().collect();
        let est = estimate_phis(&t, &track, 1000).unwrap();
        for s in est.finite.values().chain([&est.real, &est.complex]) {
            assert!(s.values.iter().all(|v| v.is_finite() && *v >= 0.0));
            assert!(s.estimate <= s.values[0]);
        }
        assert!(est.complex.values.windows(2).all(|w| w[1] < w[0]));
        assert!(est.finite.values().all(|s| s.estimate < 0.03));
        assert_eq!(est.real.estimate, 0.0);
        for (i, k) in t.fields().iter().enumerate() {
            let sum = est.real.values[i] + 2.0 * est.complex.values[i];
            assert_abs_diff_eq!(sum, est.n_over_g[i], epsilon = 1e-12);
            assert_abs_diff_eq!(
                est.n_over_g[i],
                k.degree() as f64 / k.genus(),
                epsilon = 1e-12
            );
        }
        assert_eq!(est.window.first, 4);
    }

    #[test]
    fn quadratic_sweep_two_adic_ratios() {
        let s = imaginary_sweep();
        let track: BTreeSet<u64> = [2].into_iter().collect();
        let est = estimate_phis(&s, &track, 100).unwrap();
        let series = &est.finite[&2];
        for (v, k) in series.values.iter().zip(s.fields()) {
            let n2 = v * k.genus();
            assert!([0.0, 1.0, 2.0].iter().any(|c| (n2 - c).abs() < 1e-9));
        }
        // the last field is Q(sqrt(-97)) with d = 388 and 2 ramified
        assert_abs_diff_eq!(series.estimate, 2.0 / 388f64.ln(), epsilon = 1e-12);
        assert!(series.estimate <= 2.0 / s.fields().last().unwrap().genus() + 1e-12);
    }

    #[test]
    fn estimate_rejects_bad_tracking() {
        let t = cyclo_tower();
        assert!(estimate_phis(&t, &[6].into_iter().collect(), 100).is_err());
        assert!(estimate_phis(&t, &[101].into_iter().collect(), 100).is_err());
        let one = FieldFamily::new(
            "one",
            vec![make_quadratic(2).unwrap()],
            false,
            Generator::UserList,
        )
        .unwrap();
        assert!(estimate_phis(&one, &BTreeSet::new(), 100).is_err());
    }

    #[test]
    fn reversal_changes_point_estimates_only() {
        let s = FieldFamily::from_generator(
            "q",
            Generator::QuadraticSweep {
                m_from: 2,
                m_to: 40,
            },
        )
        .unwrap();
        let mut rev_fields = s.fields().to_vec();
        rev_fields.reverse();
        let r = FieldFamily::new("rev", rev_fields, false, Generator::UserList).unwrap();
        let track: BTreeSet<u64> = [2, 3, 4].into_iter().collect();
        let a = estimate_phis(&s, &track, 100).unwrap();
        let b = estimate_phis(&r, &track, 100).unwrap();
        for q in &track {
            let mut rev = b.finite[q].values.clone();
            rev.reverse();
            assert_eq!(a.finite[q].values, rev);
        }
        assert_ne!(a.real.estimate, b.real.estimate);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify(&cyclo_tower()),
            Classification::AsymptoticallyBadEvidence
        );
        assert_eq!(
            classify(&imaginary_sweep()),
            Classification::AsymptoticallyBadEvidence
        );
        let same_rd: Vec<NumberField> = [[-2i64, 0, 1], [2, 0, 1], [-1, -2, 1], [3, -2, 1]]
            .iter()
            .map(|c| {
                make_user_field(&IntPoly::from_i64(c), Some(BigUint::from(8u32)), None).unwrap()
            })
            .collect();
        let f = FieldFamily::new("flat", same_rd, false, Generator::UserList).unwrap();
        assert_eq!(classify(&f), Classification::AsymptoticallyGoodEvidence);
        let short = FieldFamily::new(
            "short",
            f.fields()[..2].to_vec(),
            false,
            Generator::UserList,
        )
        .unwrap();
        assert_eq!(classify(&short), Classification::Undetermined);
    }

    #[test]
    fn genus_bound_examples() {
        assert_eq!(quadratic_subfield_genus_bound(0.5).unwrap(), 4.0);
        assert_eq!(quadratic_subfield_genus_bound(2.0).unwrap(), 1.0);
        assert_abs_diff_eq!(
            quadratic_subfield_genus_bound(0.1).unwrap(),
            20.0,
            epsilon = 1e-12
        );
        assert!(quadratic_subfield_genus_bound(0.0).is_err());
    }

    #[test]
    fn cube_root_bounds() {
        let b = cube_root_rd_lower_bound(8).unwrap();
        assert_abs_diff_eq!(b[0], 108f64.cbrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(b[0], 4.7622, epsilon = 1e-4);
        assert_abs_diff_eq!(b[1], 243f64.cbrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(b[1], 6.2403, epsilon = 1e-4);
        assert_abs_diff_eq!(b[2], 675f64.cbrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(b[2], 8.7721, epsilon = 1e-4);
        assert!(b.windows(2).all(|w| w[0] <= w[1]));
        assert!(cube_root_rd_lower_bound(0).is_err());
    }

    #[test]
    fn family_files() {
        let generated = r#"{"name":"t","generator":"cyclotomic-tower","params":{"prime":2,"k_from":2,"k_to":4},"is_tower":true}"#;
        let spec: FamilySpec = serde_json::from_str(generated).unwrap();
        let fam = spec.build().unwrap();
        assert_eq!(fam.len(), 3);
        assert!(fam.is_tower());

        let listed = r#"{"name":"u","fields":[{"poly":[-1,-1,0,1]},{"poly":[1,0,1],"d_K":4},{"poly":["-2",0,1],"d_K":"8"}]}"#;
        let spec: FamilySpec = serde_json::from_str(listed).unwrap();
        let fam = spec.build().unwrap();
        assert_eq!(fam.len(), 3);
        assert!(fam.fields()[0].is_discriminant_proxy());
        assert_eq!(
            member_discriminants(&fam),
            vec![
                BigUint::from(23u32),
                BigUint::from(4u32),
                BigUint::from(8u32)
            ]
        );

        let dup = r#"{"name":"d","fields":[{"poly":[1,0,1]},{"poly":[1,0,1]}]}"#;
        let spec: FamilySpec = serde_json::from_str(dup).unwrap();
        assert!(spec.build().unwrap_err().to_string().contains("distinct"));
    }
}
