//! Acceptance criteria as runnable checks, each with its own tolerance,
//! runtime budget and an oracle independent of the code under test.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use gbs_core::arith::primes_up_to;
use gbs_core::bounds::{
    bs1_bs2_consistency, c0, delta_of_n, e_of_n, exceptional_zero_floor, regulator_liminf_bound,
    tv_class_number_limsup, zero_free_width_scaled, SolvableBoundParams, WidthScale,
};
use gbs_core::bs::{bs_ratio, identity_residual};
use gbs_core::family::cube_root_rd_lower_bound;
use gbs_core::numfield::{
    make_cyclotomic, make_pure_cubic, make_quadratic, make_rationals, make_user_field,
};
use gbs_core::polyarith::{factor_degrees, poly_discriminant, FactorDegrees};
use gbs_core::quadratic::{
    class_data, class_number_imaginary, dirichlet_l1, fundamental_discriminants, squarefree_part,
};
use gbs_core::residue::{residue_from_class_data, residue_truncated_euler};
use gbs_core::splitting::splitting_counts;
use gbs_core::{FieldFamily, Generator, IntPoly, PhiVector};

use crate::commands::analyze_family;
use crate::config::{Command, RunConfig};
use crate::output;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// Every criterion at its stated size.
    Full,
    /// Smaller sweeps for a quick check; tolerances unchanged.
    Reduced,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} ({:.2} s of {} s)",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

fn timed(
    id: u8,
    name: &'static str,
    budget_secs: u64,
    check: impl FnOnce() -> (bool, String),
) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = check();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    let detail = if elapsed > budget {
        format!("{detail}; over runtime budget")
    } else {
        detail
    };
    Outcome {
        id,
        name,
        pass: ok && elapsed <= budget,
        detail,
        elapsed,
        budget,
    }
}

fn failed(err: impl fmt::Display) -> (bool, String) {
    (false, format!("error: {err}"))
}

/// Class number formula identity with `rho = L(1, chi_D)`.
pub fn criterion_1(scale: Scale) -> Outcome {
    let cutoff = match scale {
        Scale::Full => 1_000_000,
        Scale::Reduced => 100_000,
    };
    timed(1, "class number formula identity", 60, || {
        let discs = fundamental_discriminants(-1000, 1000);
        let residuals: Result<Vec<(i64, f64)>, _> = discs
            .par_iter()
            .map(|&d| {
                let cd = class_data(d, cutoff)?;
                let l = dirichlet_l1(d, cutoff)?;
                let g = 0.5 * (d.unsigned_abs() as f64).ln();
                let (r1, r2) = if d > 0 { (2, 0) } else { (0, 1) };
                Ok::<_, gbs_core::Error>((
                    d,
                    identity_residual(cd.h, cd.regulator, cd.w, r1, r2, g, l.value),
                ))
            })
            .collect();
        let residuals = match residuals {
            Ok(r) => r,
            Err(e) => return failed(e),
        };
        let worst = residuals.iter().map(|&(_, r)| r).fold(0.0, f64::max);
        let closed = residuals
            .iter()
            .filter(|(d, _)| [-3, -4, 5].contains(d))
            .map(|&(_, r)| r)
            .fold(0.0, f64::max);
        (
            worst < 1e-3 && closed < 1e-6,
            format!(
                "{} discriminants, max residual {worst:.3e}, closed-form cases {closed:.3e}",
                residuals.len()
            ),
        )
    })
}

/// Factor-degree patterns against exhaustive trial division over `F_p`.
pub fn criterion_2() -> Outcome {
    timed(2, "splitting oracle equivalence", 10, || {
        let fields = match (|| {
            Ok::<_, gbs_core::Error>(vec![
                make_quadratic(-1)?,
                make_quadratic(5)?,
                make_cyclotomic(5)?,
                make_pure_cubic(2)?,
                make_user_field(&IntPoly::from_i64(&[-1, -1, 0, 1]), None, None)?,
            ])
        })() {
            Ok(f) => f,
            Err(e) => return failed(e),
        };
        let mut checked = 0;
        for k in &fields {
            let f = k.defining_poly();
            let disc = match poly_discriminant(f) {
                Ok(d) => i64::try_from(&d).expect("small discriminant"),
                Err(e) => return failed(e),
            };
            let coeffs: Vec<i64> = f
                .coeffs()
                .iter()
                .map(|c| i64::try_from(c).expect("small coefficients"))
                .collect();
            for p in primes_up_to(200) {
                if disc % p as i64 == 0 {
                    continue;
                }
                let mut fast = match factor_degrees(f, p) {
                    Ok(FactorDegrees::Squarefree(d)) => d,
                    Ok(FactorDegrees::NotSquarefree) => {
                        return (false, format!("{} at {p}: not squarefree", k.label()))
                    }
                    Err(e) => return failed(e),
                };
                fast.sort_unstable();
                let slow = oracle::factor_degrees_naive(&coeffs, p);
                if fast != slow {
                    return (
                        false,
                        format!("{} at p = {p}: {fast:?} vs {slow:?}", k.label()),
                    );
                }
                checked += 1;
            }
        }
        (true, format!("{checked} (field, prime) pairs agree"))
    })
}

pub const HEEGNER: [i64; 9] = [-3, -4, -7, -8, -11, -19, -43, -67, -163];

pub fn criterion_3() -> Outcome {
    timed(3, "class number one discriminants", 5, || {
        let mut ones = Vec::new();
        for d in fundamental_discriminants(-200, -1) {
            match class_number_imaginary(d) {
                Ok(cd) if cd.h == 1 => ones.push(d),
                Ok(_) => {}
                Err(e) => return failed(e),
            }
        }
        ones.sort_unstable_by(|a, b| b.cmp(a));
        (ones == HEEGNER, format!("h = 1 exactly for {ones:?}"))
    })
}

/// Mean of `log(hR)/g` over imaginary fundamental discriminants.
pub fn criterion_4(scale: Scale) -> Outcome {
    let from = match scale {
        Scale::Full => -100_000,
        Scale::Reduced => -20_000,
    };
    timed(4, "classical Brauer-Siegel trend", 300, || {
        let discs = fundamental_discriminants(from, -10_000);
        let ratios: Result<Vec<f64>, _> = discs
            .par_iter()
            .map(|&d| {
                let cd = class_number_imaginary(d)?;
                bs_ratio(cd.h, cd.regulator, 0.5 * (d.unsigned_abs() as f64).ln())
            })
            .collect();
        match ratios {
            Ok(r) => {
                let mean = r.iter().sum::<f64>() / r.len() as f64;
                (
                    (0.85..=1.05).contains(&mean),
                    format!(
                        "mean {mean:.4} over {} discriminants in [{from}, -10000]",
                        r.len()
                    ),
                )
            }
            Err(e) => failed(e),
        }
    })
}

fn cyclotomic_family(k_to: u32) -> Result<FieldFamily, gbs_core::Error> {
    FieldFamily::from_generator(
        "2-power cyclotomic",
        Generator::CyclotomicTower {
            prime: 2,
            k_from: 2,
            k_to,
        },
    )
}

/// `|log rho / g|` along `Q(zeta_{2^k})` from Euler products.
pub fn criterion_5() -> Outcome {
    timed(5, "bad family residue trend", 120, || {
        let family = match cyclotomic_family(7) {
            Ok(f) => f,
            Err(e) => return failed(e),
        };
        let x = 100_000;
        let values: Result<Vec<f64>, _> = family
            .fields()
            .par_iter()
            .map(|k| {
                let prof = splitting_counts(k, x)?;
                let est = residue_truncated_euler(k, &prof, x)?;
                Ok::<_, gbs_core::Error>((est.log_rho / k.genus()).abs())
            })
            .collect();
        match values {
            Ok(v) => {
                // k = 4..=7 sit at indices 2..=5
                let decreasing = v[2..].windows(2).all(|w| w[1] < w[0]);
                let last = *v.last().expect("nonempty");
                let shown: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
                (
                    decreasing && last < 0.1,
                    format!("|log rho/g| for k = 2..7: [{}]", shown.join(", ")),
                )
            }
            Err(e) => failed(e),
        }
    })
}

/// Fifty fundamental discriminants with `|D| <= limit`, evenly spaced in sorted order.
pub fn spaced_discriminants(limit: i64, count: usize) -> Vec<i64> {
    let all = fundamental_discriminants(-limit, limit);
    if all.len() <= count {
        return all;
    }
    (0..count)
        .map(|i| all[i * (all.len() - 1) / (count - 1)])
        .collect()
}

pub fn criterion_6() -> Outcome {
    timed(6, "residue cross-validation", 120, || {
        let discs = spaced_discriminants(500, 50);
        let x = 100_000;
        let errors: Result<Vec<(i64, f64)>, _> = discs
            .par_iter()
            .map(|&d| {
                let k = make_quadratic(squarefree_part(d))?;
                let cd = class_data(d, 1_000_000)?;
                let exact = residue_from_class_data(
                    k.label(),
                    cd.h,
                    cd.regulator,
                    cd.w,
                    k.r1(),
                    k.r2(),
                    k.abs_discriminant(),
                )?;
                let prof = splitting_counts(&k, x)?;
                let euler = residue_truncated_euler(&k, &prof, x)?;
                Ok::<_, gbs_core::Error>((d, (euler.rho - exact.rho).abs() / exact.rho))
            })
            .collect();
        match errors {
            Ok(e) => {
                let within_2 = e.iter().filter(|(_, r)| *r < 0.02).count();
                let worst = e
                    .iter()
                    .copied()
                    .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
                (
                    e.len() == 50 && within_2 >= 45 && worst.1 < 0.05,
                    format!(
                        "{within_2}/{} within 0.02, worst {:.4} at D = {}",
                        e.len(),
                        worst.1,
                        worst.0
                    ),
                )
            }
            Err(e) => failed(e),
        }
    })
}

/// Largest exponent by repeated division, independent of the factorizer.
fn e_oracle(n: u64) -> u32 {
    let mut m = n;
    let mut best = 0;
    let mut d = 2;
    while m > 1 {
        let mut e = 0;
        while m.is_multiple_of(d) {
            m /= d;
            e += 1;
        }
        best = best.max(e);
        d += 1;
    }
    best
}

pub fn criterion_7(murty_c: f64) -> Outcome {
    timed(7, "bounds layer", 1, || {
        let run = || -> Result<(bool, String), gbs_core::Error> {
            let mut notes = Vec::new();
            let mut ok = true;
            for n in 2..=64u64 {
                let e = e_oracle(n);
                let delta = f64::from(e + 1).powi(2) * 3f64.cbrt() * 12f64.powi(e as i32 - 1);
                if e_of_n(n)? != e || delta_of_n::<f64>(n)? != delta {
                    ok = false;
                    notes.push(format!("e/delta mismatch at n = {n}"));
                }
            }
            let c = c0::<f64>();
            if (c * 100.0).floor() != 161.0 {
                ok = false;
                notes.push(format!("c0 = {c}"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let keys = [
                2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 97, 121, 125, 128, 997,
            ];
            let mut worst_link = 0.0f64;
            for _ in 0..1000 {
                let mut finite = BTreeMap::new();
                for &q in &keys {
                    if rng.gen_bool(0.4) {
                        finite.insert(q, rng.gen_range(0.0..5.0));
                    }
                }
                let phi = PhiVector::new(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0), finite)?;
                worst_link = worst_link.max(bs1_bs2_consistency(&phi)?.abs());
            }
            if worst_link >= 1e-12 {
                ok = false;
            }
            notes.push(format!("max BS1/BS2 gap {worst_link:.1e}"));
            let reg = regulator_liminf_bound(1.0, 0.0)?;
            if !(1.3609..=1.3611).contains(&reg) {
                ok = false;
            }
            notes.push(format!("regulator bound {reg:.5}"));
            let tv = tv_class_number_limsup(&PhiVector::zero())?;
            if tv != 1.0 {
                ok = false;
                notes.push(format!("TV limsup at phi = 0 is {tv}"));
            }
            // the zero-free width must sit inside the exceptional-zero floor
            let mut violations = 0;
            for n in 2..=64u64 {
                let params = SolvableBoundParams::new(n, murty_c, 1.0)?;
                let mut g = 2.0;
                while g <= 1000.0 {
                    let width =
                        zero_free_width_scaled(&params, 2.0 * g, WidthScale::LogDiscriminant)?;
                    if !(width < 1.0 - exceptional_zero_floor(g)?) {
                        violations += 1;
                    }
                    g *= 1.5;
                }
            }
            if violations > 0 {
                ok = false;
            }
            notes.push(format!(
                "width comparison violations {violations} (c = {murty_c})"
            ));
            Ok((ok, format!("c0 = {c:.5}; {}", notes.join("; "))))
        };
        run().unwrap_or_else(failed)
    })
}

pub fn criterion_8() -> Outcome {
    timed(8, "Chebyshev sanity", 30, || {
        let run = || -> Result<(bool, String), gbs_core::Error> {
            let q = make_rationals();
            let g_q = splitting_counts(&q, 1_000_000)?.chebyshev_g(1e6)?;
            let k = make_quadratic(-1)?;
            let g_i = splitting_counts(&k, 10_000)?.chebyshev_g(1e4)?;
            let rel_q = (g_q / 1e6 - 1.0).abs();
            let rel_i = (g_i / 1e4 - 1.0).abs();
            Ok((
                rel_q < 0.02 && rel_i < 0.05,
                format!("G_Q(1e6)/1e6 - 1 = {rel_q:.2e}, G_Q(i)(1e4)/1e4 - 1 = {rel_i:.2e}"),
            ))
        };
        run().unwrap_or_else(failed)
    })
}

pub fn criterion_9() -> Outcome {
    timed(
        9,
        "cube-root family divergence",
        1,
        || match cube_root_rd_lower_bound(8) {
            Ok(b) => {
                let monotone = b.windows(2).all(|w| w[0] <= w[1]);
                let last = *b.last().expect("eight terms");
                (
                    monotone && last > 12.0,
                    format!("final lower bound {last:.4}, nondecreasing: {monotone}"),
                )
            }
            Err(e) => failed(e),
        },
    )
}

/// The analysis of the cyclotomic tower rendered under two pool sizes.
pub fn criterion_10(scale: Scale) -> Outcome {
    let (k_to, euler) = match scale {
        Scale::Full => (7, 100_000),
        Scale::Reduced => (5, 20_000),
    };
    timed(10, "determinism across thread counts", 300, || {
        let family = match cyclotomic_family(k_to) {
            Ok(f) => f,
            Err(e) => return failed(e),
        };
        let mut config = RunConfig::with_defaults(Command::Analyze);
        config.euler_cutoff = euler;
        config.q_max = euler.min(10_000);
        let render = |threads: usize| -> Result<(Vec<u8>, Vec<u8>), String> {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| e.to_string())?;
            pool.install(|| {
                let analysis = analyze_family(&config, &family).map_err(|e| e.to_string())?;
                Ok((
                    output::json(&analysis).map_err(|e| e.to_string())?,
                    output::report_csv(&analysis).map_err(|e| e.to_string())?,
                ))
            })
        };
        match (render(1), render(8)) {
            (Ok(a), Ok(b)) => (
                a == b,
                format!(
                    "JSON {} bytes, CSV {} bytes, identical: {}",
                    a.0.len(),
                    a.1.len(),
                    a == b
                ),
            ),
            (Err(e), _) | (_, Err(e)) => failed(e),
        }
    })
}

pub fn run_all(scale: Scale, config: &RunConfig) -> Vec<Outcome> {
    vec![
        criterion_1(scale),
        criterion_2(),
        criterion_3(),
        criterion_4(scale),
        criterion_5(),
        criterion_6(),
        criterion_7(config.murty_c),
        criterion_8(),
        criterion_9(),
        criterion_10(scale),
    ]
}

pub fn render(outcomes: &[Outcome]) -> Vec<u8> {
    let mut text = String::new();
    for o in outcomes {
        text.push_str(&o.to_string());
        text.push('\n');
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    text.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
    text.into_bytes()
}

/// Exhaustive factorization over `F_p` for small degree.
pub mod oracle {
    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }

    fn inv(a: u64, p: u64) -> u64 {
        (1..p)
            .find(|&x| (a as u128 * x as u128 % p as u128) == 1)
            .expect("nonzero residue")
    }

    /// `(quotient, remainder)` of `a / b` over `F_p`.
    fn div_rem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        if r.len() <= db {
            return (vec![0], trim(r));
        }
        let lead_inv = inv(b[db], p);
        let mut q = vec![0u64; r.len() - db];
        for i in (0..q.len()).rev() {
            let coef = r[i + db] % p * lead_inv % p;
            q[i] = coef;
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + p - coef * bj % p) % p;
            }
        }
        r.truncate(db.max(1));
        (trim(q), trim(r))
    }

    /// Monic polynomial of degree `d` indexed by `index` in base `p`.
    fn monic(d: usize, mut index: u64, p: u64) -> Vec<u64> {
        let mut c = vec![0u64; d + 1];
        for coef in c.iter_mut().take(d) {
            *coef = index % p;
            index /= p;
        }
        c[d] = 1;
        c
    }

    /// Degrees of irreducible factors of a squarefree `f mod p`, sorted.
    pub fn factor_degrees_naive(f: &[i64], p: u64) -> Vec<usize> {
        let mut rest = trim(f.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect());
        let mut degrees = Vec::new();
        let mut d = 1;
        while 2 * d < rest.len() {
            let total = p.pow(d as u32);
            for index in 0..total {
                let cand = monic(d, index, p);
                let (q, r) = div_rem(&rest, &cand, p);
                if r == vec![0] {
                    degrees.push(d);
                    rest = q;
                    if 2 * d > rest.len() - 1 {
                        break;
                    }
                }
            }
            d += 1;
        }
        if rest.len() > 1 {
            degrees.push(rest.len() - 1);
        }
        degrees.sort_unstable();
        degrees
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn small_cases() {
            assert_eq!(factor_degrees_naive(&[1, 0, 1], 5), vec![1, 1]);
            assert_eq!(factor_degrees_naive(&[1, 0, 1], 7), vec![2]);
            assert_eq!(factor_degrees_naive(&[-2, 0, 0, 1], 7), vec![3]);
            assert_eq!(factor_degrees_naive(&[-2, 0, 0, 1], 5), vec![1, 2]);
            assert_eq!(factor_degrees_naive(&[1, 1, 1, 1, 1], 11), vec![1, 1, 1, 1]);
            assert_eq!(factor_degrees_naive(&[1, 1, 1, 1, 1], 2), vec![4]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_criteria_pass() {
        for o in [
            criterion_2(),
            criterion_3(),
            criterion_7(1.0),
            criterion_9(),
        ] {
            assert!(o.pass, "{o}");
        }
    }

    #[test]
    fn forced_width_violation_is_reported() {
        let o = criterion_7(1e6);
        assert!(!o.pass);
        assert!(o.detail.contains("violations"), "{o}");
    }

    #[test]
    fn spaced_selection() {
        let d = spaced_discriminants(500, 50);
        assert_eq!(d.len(), 50);
        assert!(d.windows(2).all(|w| w[0] < w[1]));
        assert!(d.iter().all(|x| x.abs() <= 500));
        assert_eq!(d[0], -499);
        assert_eq!(*d.last().unwrap(), 497);
    }
}
