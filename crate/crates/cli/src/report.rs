use std::io::Write;

use serde::Serialize;

use qsle_core::ent_time::{
    energy_gap, energy_gap_joules, figure_data, tau_m, verify_separabilization, write_figure_csv,
    RESIDUAL_TOL,
};
use qsle_core::separable::geometric_entanglement;
use qsle_core::units::{format_engineering, format_sig};
use qsle_core::{OptConfig, PureState};

use crate::{Failure, Format};

#[derive(Serialize)]
struct EntanglementRow {
    m: usize,
    e: f64,
    overlap: f64,
    partition: String,
    converged: bool,
    iterations: usize,
}

#[derive(Serialize)]
struct TauRow {
    m: usize,
    e: f64,
    partition: String,
    omega_rad_s: f64,
    omega_tau: f64,
    tau_s: f64,
    delta_e_over_hbar_rad_s: f64,
    delta_e_j: f64,
    converged: bool,
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn warn_unconverged(m: usize) {
    eprintln!("WARN m={m}: optimizer did not converge; result is the best found");
}

pub fn entanglement(
    psi: &PureState,
    ms: &[usize],
    cfg: &OptConfig,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let mut rows = Vec::with_capacity(ms.len());
    for &m in ms {
        let g = geometric_entanglement(psi, m, cfg)?;
        if !g.best.converged {
            warn_unconverged(m);
        }
        rows.push(EntanglementRow {
            m,
            e: g.value,
            overlap: g.best.overlap,
            partition: g.best.partition.to_string(),
            converged: g.best.converged,
            iterations: g.best.iterations_used,
        });
    }
    match format {
        Format::Table => {
            for r in &rows {
                writeln!(out, "m={} E={:.9} partition={}", r.m, r.e, r.partition)?;
            }
        }
        Format::Csv => {
            writeln!(out, "m,E,overlap,partition,converged,iterations")?;
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.m,
                    format_sig(r.e, 12),
                    format_sig(r.overlap, 12),
                    csv_quote(&r.partition),
                    r.converged,
                    r.iterations
                )?;
            }
        }
        Format::Json => write_json(out, &rows)?,
    }
    Ok(())
}

pub fn tau(
    psi: &PureState,
    ms: &[usize],
    omega: f64,
    cfg: &OptConfig,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let mut rows = Vec::with_capacity(ms.len());
    for &m in ms {
        let r = tau_m(psi, m, omega, cfg)?.in_seconds();
        if !r.converged {
            warn_unconverged(m);
        }
        rows.push(TauRow {
            m,
            e: r.e_m,
            partition: r.partition.to_string(),
            omega_rad_s: omega,
            omega_tau: r.phase(),
            tau_s: r.tau_seconds.expect("seconds requested"),
            delta_e_over_hbar_rad_s: energy_gap(omega),
            delta_e_j: energy_gap_joules(omega),
            converged: r.converged,
        });
    }
    match format {
        Format::Table => {
            for r in &rows {
                writeln!(out, "m={} E={:.9} partition={}", r.m, r.e, r.partition)?;
                writeln!(out, "  omega*tau = {}", format_sig(r.omega_tau, 3))?;
                writeln!(out, "  tau = {}", format_engineering(r.tau_s, "s", 3))?;
                writeln!(
                    out,
                    "  delta_E/hbar = {} rad/s (delta_E = {} J)",
                    format_sig(r.delta_e_over_hbar_rad_s, 3),
                    format_sig(r.delta_e_j, 3)
                )?;
            }
        }
        Format::Csv => {
            writeln!(out, "m,E,partition,omega,omega_tau,tau_s,delta_E_over_hbar,delta_E_J")?;
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.m,
                    format_sig(r.e, 12),
                    csv_quote(&r.partition),
                    format_sig(r.omega_rad_s, 12),
                    format_sig(r.omega_tau, 12),
                    format_sig(r.tau_s, 12),
                    format_sig(r.delta_e_over_hbar_rad_s, 12),
                    format_sig(r.delta_e_j, 12)
                )?;
            }
        }
        Format::Json => write_json(out, &rows)?,
    }
    Ok(())
}

/// Returns true when every requested m passed.
pub fn verify(
    psi: &PureState,
    ms: &[usize],
    omega: f64,
    cfg: &OptConfig,
    format: Format,
    out: &mut dyn Write,
) -> Result<bool, Failure> {
    let mut records = Vec::with_capacity(ms.len());
    for &m in ms {
        let rec = verify_separabilization(psi, m, omega, cfg)?;
        if !rec.certified {
            eprintln!("WARN m={m}: non-certified, optimizer did not converge");
        }
        records.push(rec);
    }
    match format {
        Format::Table => {
            for r in &records {
                writeln!(
                    out,
                    "m={} E={:.9} partition={} omega*tau={:.9} fidelity_deficit={:.3e}",
                    r.m,
                    r.e_m,
                    r.partition,
                    r.omega * r.tau_internal,
                    r.fidelity_deficit
                )?;
                if r.passed() {
                    writeln!(out, "PASS residual={:.3e}<{RESIDUAL_TOL:e}", r.residual_e_m)?;
                } else {
                    writeln!(out, "FAIL residual={:.3e}>={RESIDUAL_TOL:e}", r.residual_e_m)?;
                }
            }
        }
        Format::Csv => {
            writeln!(
                out,
                "m,E,partition,omega_tau,fidelity_deficit,residual_E,evolved,certified,passed"
            )?;
            for r in &records {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.m,
                    format_sig(r.e_m, 12),
                    csv_quote(&r.partition),
                    format_sig(r.omega * r.tau_internal, 12),
                    format_sig(r.fidelity_deficit, 12),
                    format_sig(r.residual_e_m, 12),
                    r.evolved,
                    r.certified,
                    r.passed()
                )?;
            }
        }
        Format::Json => write_json(out, &records)?,
    }
    Ok(records.iter().all(|r| r.passed()))
}

pub fn figure(omegas: &[f64], grid: &[f64], format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let rows = figure_data(omegas, grid)?;
    match format {
        Format::Json => write_json(out, &rows)?,
        Format::Table | Format::Csv => write_figure_csv(&rows, out)?,
    }
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure::usage(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}
