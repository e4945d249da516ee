//! JSON and CSV rendering.

use serde::Serialize;

use crate::commands::{Analysis, FieldResidues};
use crate::error::CliError;

pub fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(CliError::io)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// One header row from the struct fields, then one row per item.
pub fn rows_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(CliError::io)?;
    }
    w.into_inner().map_err(CliError::io)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-field rows, a blank line, then `key,value` footer rows.
pub fn report_csv(analysis: &Analysis) -> Result<Vec<u8>, CliError> {
    let report = &analysis.report;
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    w.write_record([
        "label",
        "n",
        "g",
        "rd",
        "log_rho_over_g",
        "log_rho_over_g_band",
        "log_hR_over_g",
        "identity_residual",
    ])
    .map_err(CliError::io)?;
    for r in &report.per_field {
        w.write_record([
            r.label.clone(),
            r.n.to_string(),
            r.g.to_string(),
            r.rd.to_string(),
            r.log_rho_over_g.to_string(),
            r.log_rho_over_g_band.to_string(),
            opt(r.log_hr_over_g),
            opt(r.identity_residual),
        ])
        .map_err(CliError::io)?;
    }
    let mut bytes = w.into_inner().map_err(CliError::io)?;
    bytes.push(b'\n');

    let classification = serde_json::to_value(report.classification).map_err(CliError::io)?;
    let mut footer = csv::Writer::from_writer(Vec::new());
    let p = &analysis.parameters;
    let rows: Vec<(&str, String)> = vec![
        ("family", report.family_name.clone()),
        (
            "classification",
            classification.as_str().unwrap_or_default().to_string(),
        ),
        ("conjectured_bs", report.conjectured_bs.to_string()),
        ("conjectured_rho", report.conjectured_rho.to_string()),
        ("plug_in_bs", report.plug_in_bs.to_string()),
        ("plug_in_rho", report.plug_in_rho.to_string()),
        ("phi_R_hat", report.phi_hat.real.to_string()),
        ("phi_C_hat", report.phi_hat.complex.to_string()),
        ("tv_sanity", report.tv_sanity.to_string()),
        ("q_max", p.q_max.to_string()),
        ("euler_cutoff", p.euler_cutoff.to_string()),
        ("l_cutoff", p.l_cutoff.to_string()),
        ("murty_c", p.murty_c.to_string()),
        ("stark_c", p.stark_c.to_string()),
    ];
    footer
        .write_record(["key", "value"])
        .map_err(CliError::io)?;
    for (k, v) in rows {
        footer.write_record([k, v.as_str()]).map_err(CliError::io)?;
    }
    for c in &report.caveats {
        footer
            .write_record(["caveat", c.as_str()])
            .map_err(CliError::io)?;
    }
    bytes.extend(footer.into_inner().map_err(CliError::io)?);
    Ok(bytes)
}

pub fn residues_csv(rows: &[FieldResidues]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "field",
        "method",
        "rho",
        "log_rho",
        "cutoff",
        "error_band",
        "uncertain_primes",
        "relative_difference",
        "pass",
    ])
    .map_err(CliError::io)?;
    for row in rows {
        for e in &row.estimates {
            let method = serde_json::to_value(e.method).map_err(CliError::io)?;
            let is_euler = e.method == gbs_core::residue::ResidueMethod::TruncatedEuler;
            let (rel, pass) = match (&row.reconciliation, is_euler) {
                (Some(r), true) => (r.relative_difference.to_string(), r.pass.to_string()),
                _ => (String::new(), String::new()),
            };
            w.write_record([
                e.field_label.clone(),
                method.as_str().unwrap_or_default().to_string(),
                e.rho.to_string(),
                e.log_rho.to_string(),
                e.cutoff.to_string(),
                e.error_band.to_string(),
                e.uncertain_prime_count.to_string(),
                rel,
                pass,
            ])
            .map_err(CliError::io)?;
        }
    }
    w.into_inner().map_err(CliError::io)
}
