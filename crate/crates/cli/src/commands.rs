//! Subcommand implementations. Each renders its result to bytes so callers
//! decide where output goes.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use gbs_core::arith::is_prime_power;
use gbs_core::bounds::{bounds_table, BoundsRow};
use gbs_core::bs::convergence_report;
use gbs_core::family::{estimate_phis_with_profiles, family_profiles};
use gbs_core::quadratic::{class_data, field_label, fundamental_discriminants};
use gbs_core::residue::{
    reconcile, residue_from_class_data, residue_quadratic_l, residue_truncated_euler,
    Reconciliation,
};
use gbs_core::{BSReport, ClassData, FamilySpec, FieldFamily, ResidueEstimate};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output;

/// Largest prime power tracked when estimating `phi_q`.
pub const TRACK_LIMIT: u64 = 100;

pub fn read_family_spec(path: Option<&Path>) -> Result<FamilySpec, CliError> {
    let path = path.ok_or_else(|| CliError::Input("--family PATH is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn build_family(spec: &FamilySpec) -> Result<FieldFamily, CliError> {
    spec.build().map_err(CliError::input)
}

/// Settings echoed next to every analysis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Parameters {
    pub q_max: u64,
    pub euler_cutoff: u64,
    pub l_cutoff: u64,
    pub tracked_q_max: u64,
    pub murty_c: f64,
    pub stark_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Analysis {
    pub parameters: Parameters,
    pub report: BSReport,
}

/// Residues come from quadratic L-values with class data when every member
/// is quadratic, and from truncated Euler products otherwise.
pub fn analyze_family(config: &RunConfig, family: &FieldFamily) -> Result<Analysis, CliError> {
    let profiles = family_profiles(family, config.profile_limit())?;
    let tracked_q_max = TRACK_LIMIT.min(config.q_max);
    let track: BTreeSet<u64> = (2..=tracked_q_max).filter(|&q| is_prime_power(q)).collect();
    let inv = estimate_phis_with_profiles(family, &track, &profiles)?;

    let discs: Option<Vec<i64>> = family
        .fields()
        .iter()
        .map(|k| k.quadratic_discriminant())
        .collect();
    let (residues, classes): (Vec<ResidueEstimate>, Option<Vec<ClassData>>) = match discs {
        Some(discs) => {
            let pairs = discs
                .par_iter()
                .map(|&d| {
                    Ok((
                        residue_quadratic_l(d, config.l_cutoff)?,
                        class_data(d, config.l_cutoff)?,
                    ))
                })
                .collect::<gbs_core::Result<Vec<_>>>()?;
            let (res, cds) = pairs.into_iter().unzip();
            (res, Some(cds))
        }
        None => {
            let res = family
                .fields()
                .par_iter()
                .zip(profiles.par_iter())
                .map(|(k, p)| residue_truncated_euler(k, p, config.euler_cutoff))
                .collect::<gbs_core::Result<Vec<_>>>()?;
            (res, None)
        }
    };
    let report = convergence_report(family, &inv, &residues, classes.as_deref())?;
    Ok(Analysis {
        parameters: Parameters {
            q_max: config.q_max,
            euler_cutoff: config.euler_cutoff,
            l_cutoff: config.l_cutoff,
            tracked_q_max,
            murty_c: config.murty_c,
            stark_c: config.stark_c,
        },
        report,
    })
}

pub fn analyze(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let spec = read_family_spec(config.family_spec_path.as_deref())?;
    let family = build_family(&spec)?;
    let analysis = analyze_family(config, &family)?;
    match config.format {
        Format::Json => output::json(&analysis),
        Format::Csv => output::report_csv(&analysis),
    }
}

pub fn bounds(config: &RunConfig, n_max: u64, log_dk: f64) -> Result<Vec<u8>, CliError> {
    if n_max < 2 {
        return Err(CliError::Input(format!(
            "--n-max {n_max} must be at least 2"
        )));
    }
    if !(log_dk > 0.0) {
        return Err(CliError::Input("--log-dk must be positive".into()));
    }
    let rows: Vec<BoundsRow> = bounds_table(n_max, log_dk, config.murty_c)?;
    match config.format {
        Format::Json => output::json(&rows),
        Format::Csv => output::rows_csv(&rows),
    }
}

/// One fundamental discriminant in a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticRow {
    pub d: i64,
    pub label: String,
    pub h: u64,
    pub regulator: f64,
    pub w: u32,
    pub class_method: String,
    pub l_value: f64,
    pub l_band: f64,
    pub log_hr_over_g: f64,
    pub identity_residual: f64,
}

pub fn quadratic_rows(
    d_from: i64,
    d_to: i64,
    l_cutoff: u64,
) -> Result<Vec<QuadraticRow>, CliError> {
    if d_from > d_to {
        return Err(CliError::Input(format!("empty range {d_from}..={d_to}")));
    }
    let discs = fundamental_discriminants(d_from, d_to);
    let rows = discs
        .par_iter()
        .map(|&d| {
            let cd = class_data(d, l_cutoff)?;
            let l = residue_quadratic_l(d, l_cutoff)?;
            let g = 0.5 * (d.unsigned_abs() as f64).ln();
            let (r1, r2) = if d > 0 { (2, 0) } else { (0, 1) };
            Ok(QuadraticRow {
                d,
                label: field_label(d),
                h: cd.h,
                regulator: cd.regulator,
                w: cd.w,
                class_method: serde_json::to_value(cd.method)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                l_value: l.rho,
                l_band: l.error_band,
                log_hr_over_g: gbs_core::bs::bs_ratio(cd.h, cd.regulator, g)?,
                identity_residual: gbs_core::bs::identity_residual(
                    cd.h,
                    cd.regulator,
                    cd.w,
                    r1,
                    r2,
                    g,
                    l.rho,
                ),
            })
        })
        .collect::<gbs_core::Result<Vec<_>>>()?;
    Ok(rows)
}

pub fn quadratic_sweep(config: &RunConfig, d_from: i64, d_to: i64) -> Result<Vec<u8>, CliError> {
    let rows = quadratic_rows(d_from, d_to, config.l_cutoff)?;
    match config.format {
        Format::Json => output::json(&rows),
        Format::Csv => output::rows_csv(&rows),
    }
}

/// All residue estimates for one field.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldResidues {
    pub field: String,
    pub estimates: Vec<ResidueEstimate>,
    /// Euler estimate against the most accurate other estimate.
    pub reconciliation: Option<Reconciliation>,
}

pub fn residue_table(
    config: &RunConfig,
    family: &FieldFamily,
    tolerance: f64,
) -> Result<Vec<FieldResidues>, CliError> {
    if !(tolerance > 0.0) {
        return Err(CliError::Input("--tolerance must be positive".into()));
    }
    let profiles = family_profiles(family, config.euler_cutoff)?;
    let rows = family
        .fields()
        .par_iter()
        .zip(profiles.par_iter())
        .map(|(k, prof)| {
            let euler = residue_truncated_euler(k, prof, config.euler_cutoff)?;
            let mut estimates = Vec::new();
            if let Some(d) = k.quadratic_discriminant() {
                let cd = class_data(d, config.l_cutoff)?;
                estimates.push(residue_from_class_data(
                    k.label(),
                    cd.h,
                    cd.regulator,
                    cd.w,
                    k.r1(),
                    k.r2(),
                    k.abs_discriminant(),
                )?);
                estimates.push(residue_quadratic_l(d, config.l_cutoff)?);
            }
            let reconciliation = match estimates.first() {
                Some(exact) => Some(reconcile(exact, &euler, tolerance)?),
                None => None,
            };
            estimates.push(euler);
            Ok(FieldResidues {
                field: k.label().to_string(),
                estimates,
                reconciliation,
            })
        })
        .collect::<gbs_core::Result<Vec<_>>>()?;
    Ok(rows)
}

pub fn residue(config: &RunConfig, tolerance: f64) -> Result<Vec<u8>, CliError> {
    let spec = read_family_spec(config.family_spec_path.as_deref())?;
    let family = build_family(&spec)?;
    let rows = residue_table(config, &family, tolerance)?;
    match config.format {
        Format::Json => output::json(&rows),
        Format::Csv => output::residues_csv(&rows),
    }
}
