//! Minimal time to make a state m-separable.
//!
//! Under the saturating generator of energy gap `2ω`, the shortest unitary
//! path from `psi` to the nearest m-separable state takes
//! `tau_m = arcsin(sqrt(E_m)) / ω`, and conversely `E_m = sin^2(ω tau_m)`.

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsl::{build_h_opt, evolve_opt, phase_align};
use crate::separable::{geometric_entanglement, OptConfig};
use crate::state::{assemble, Partition, ProductState, PureState};
use crate::units::{format_sig, HBAR};

/// `E_m` at or below this is treated as exactly separable: `tau_m = 0`.
pub const SEPARABLE_FLOOR: f64 = 1e-9;

/// Residual entanglement below which a separabilization run passes.
pub const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct TimeReport {
    pub m: usize,
    pub e_m: f64,
    /// `ω tau` lies in `[0, π/2]`; units of `1/ω`.
    pub tau_internal: f64,
    /// Set when `omega` is known to be in rad/s.
    pub tau_seconds: Option<f64>,
    pub omega: f64,
    pub closest_separable: ProductState,
    pub partition: Partition,
    pub converged: bool,
}

impl TimeReport {
    /// Declares `omega` to be in rad/s, so the internal time is in seconds.
    pub fn in_seconds(mut self) -> Self {
        self.tau_seconds = Some(self.tau_internal);
        self
    }

    /// Dimensionless rotation angle `ω tau`.
    pub fn phase(&self) -> f64 {
        self.omega * self.tau_internal
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("omega must be positive, got {omega}")))
    }
}

/// `arcsin(sqrt(E)) / ω`.
pub fn tau_from_entanglement(e: f64, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::Domain(format!("entanglement must lie in [0, 1], got {e}")));
    }
    Ok(e.sqrt().asin() / omega)
}

/// `E_m = sin^2(ω tau)` on the principal branch `0 <= ω tau <= π/2`.
pub fn entanglement_from_time(tau: f64, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    let phase = omega * tau;
    if !(0.0..=FRAC_PI_2).contains(&phase) {
        return Err(Error::Domain(format!(
            "ω·tau = {phase} is outside [0, π/2]"
        )));
    }
    Ok(phase.sin().powi(2))
}

/// Gap `2ω` between the nonzero eigenvalues of the optimal generator, in
/// internal units (ħ = 1).
pub fn energy_gap(omega: f64) -> f64 {
    2.0 * omega
}

/// Gap `2ħω` in joules for `omega` in rad/s.
pub fn energy_gap_joules(omega_rad_s: f64) -> f64 {
    2.0 * HBAR * omega_rad_s
}

/// Minimal time to reach an m-separable state, with the state reached.
pub fn tau_m(psi: &PureState, m: usize, omega: f64, cfg: &OptConfig) -> Result<TimeReport> {
    check_omega(omega)?;
    let g = geometric_entanglement(psi, m, cfg)?;
    let e_m = if g.value <= SEPARABLE_FLOOR { 0.0 } else { g.value };
    Ok(TimeReport {
        m,
        e_m,
        tau_internal: tau_from_entanglement(e_m, omega)?,
        tau_seconds: None,
        omega,
        closest_separable: g.best.product,
        partition: g.best.partition,
        converged: g.best.converged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub m: usize,
    pub e_m: f64,
    pub omega: f64,
    pub tau_internal: f64,
    /// `|<target|evolved>|^2`; 1 when no evolution was needed.
    pub target_fidelity: f64,
    pub fidelity_deficit: f64,
    /// `E_m` of the evolved state.
    pub residual_e_m: f64,
    pub evolved: bool,
    /// False when the optimizer did not converge for the target search.
    pub certified: bool,
    pub partition: String,
}

impl VerificationRecord {
    pub fn passed(&self) -> bool {
        self.residual_e_m < RESIDUAL_TOL
    }
}

/// Evolves `psi` under the optimal generator towards its closest
/// m-separable state for `tau_m` and measures how separable the result is.
pub fn verify_separabilization(
    psi: &PureState,
    m: usize,
    omega: f64,
    cfg: &OptConfig,
) -> Result<VerificationRecord> {
    let report = tau_m(psi, m, omega, cfg)?;
    let mut record = VerificationRecord {
        m,
        e_m: report.e_m,
        omega,
        tau_internal: report.tau_internal,
        target_fidelity: 1.0,
        fidelity_deficit: 0.0,
        residual_e_m: report.e_m,
        evolved: false,
        certified: report.converged,
        partition: report.partition.to_string(),
    };
    if report.tau_internal == 0.0 {
        return Ok(record);
    }
    let target = phase_align(psi, &assemble(&report.closest_separable))?;
    let h = build_h_opt(psi, &target, omega)?;
    let evolved = evolve_opt(&h, report.tau_internal);
    let fidelity = target.inner(&evolved)?.norm_sqr();
    record.target_fidelity = fidelity;
    record.fidelity_deficit = (1.0 - fidelity).max(0.0);
    record.residual_e_m = geometric_entanglement(&evolved, m, cfg)?.value;
    record.evolved = true;
    Ok(record)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FigureRow {
    pub e: f64,
    pub omega: f64,
    pub tau: f64,
}

/// `E = 0, 0.01, ..., 1`.
pub fn default_e_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

/// `tau = arcsin(sqrt(E)) / ω` for every `ω` (outer) and `E` (inner).
pub fn figure_data(omegas: &[f64], e_grid: &[f64]) -> Result<Vec<FigureRow>> {
    let mut rows = Vec::with_capacity(omegas.len() * e_grid.len());
    for &omega in omegas {
        for &e in e_grid {
            rows.push(FigureRow {
                e,
                omega,
                tau: tau_from_entanglement(e, omega)?,
            });
        }
    }
    Ok(rows)
}

/// CSV with header `E,omega,tau`, LF line endings, 12 significant digits.
pub fn write_figure_csv<W: Write>(rows: &[FigureRow], mut out: W) -> io::Result<()> {
    writeln!(out, "E,omega,tau")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{}",
            format_sig(r.e, 12),
            format_sig(r.omega, 12),
            format_sig(r.tau, 12)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn headline_times() {
        let t = tau_from_entanglement(0.8, 1e9).unwrap();
        assert!((t * 1e9 - 1.11).abs() < 0.005, "{t}");
        let t = tau_from_entanglement(0.6, 1e9).unwrap();
        assert!((t * 1e9 - 0.89).abs() < 0.005, "{t}");
    }

    #[test]
    fn time_to_entanglement() {
        assert_eq!(entanglement_from_time(0.0, 2.0).unwrap(), 0.0);
        assert_abs_diff_eq!(entanglement_from_time(FRAC_PI_2, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        let tau = 0.8f64.sqrt().asin() / 3.0;
        assert_abs_diff_eq!(entanglement_from_time(tau, 3.0).unwrap(), 0.8, epsilon = 1e-12);
        assert!(entanglement_from_time(-0.1, 1.0).is_err());
        assert!(entanglement_from_time(2.0, 1.0).is_err());
        assert!(entanglement_from_time(1.0, 0.0).is_err());
    }

    #[test]
    fn gap() {
        assert_eq!(energy_gap(1e9), 2e9);
        assert_eq!(energy_gap(0.5), 1.0);
        assert_abs_diff_eq!(energy_gap_joules(1e9), 2.109143634e-25, epsilon = 1e-33);
    }

    #[test]
    fn arcsin_arccos_consistency() {
        for i in 0..=1000 {
            let e = i as f64 / 1000.0;
            assert_abs_diff_eq!(e.sqrt().asin(), (1.0 - e).sqrt().acos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn product_input_has_zero_time() {
        let psi = PureState::basis(&[2, 2, 2], &[1, 0, 1]).unwrap();
        let r = tau_m(&psi, 3, 1.0, &OptConfig::default()).unwrap();
        assert_eq!(r.tau_internal, 0.0);
        assert_eq!(r.e_m, 0.0);
        let v = verify_separabilization(&psi, 3, 1.0, &OptConfig::default()).unwrap();
        assert!(!v.evolved);
        assert_eq!(v.residual_e_m, 0.0);
        assert!(v.passed());
    }

    #[test]
    fn bell_separabilization() {
        let bell = PureState::from_real(vec![2, 2], &[1., 0., 0., 1.]).unwrap();
        for omega in [0.3, 1.0, 1e9] {
            let v = verify_separabilization(&bell, 2, omega, &OptConfig::default()).unwrap();
            assert!(v.evolved);
            assert!(v.residual_e_m < 1e-6);
            assert!(v.fidelity_deficit < 1e-9);
            assert_abs_diff_eq!(v.tau_internal * omega, FRAC_PI_4, epsilon = 1e-8);
        }
    }

    #[test]
    fn figure_rows() {
        let rows = figure_data(&[1.0, 2.0], &default_e_grid()).unwrap();
        assert_eq!(rows.len(), 202);
        assert_eq!(rows[0].tau, 0.0);
        assert_abs_diff_eq!(rows[100].tau, FRAC_PI_2, epsilon = 1e-15);
        for i in 0..101 {
            assert_abs_diff_eq!(rows[i].tau, 2.0 * rows[101 + i].tau, epsilon = 1e-15);
        }
        assert!(figure_data(&[0.0], &[0.5]).is_err());
        assert!(figure_data(&[1.0], &[1.5]).is_err());
    }

    #[test]
    fn figure_csv_golden_row() {
        let rows = figure_data(&[1e9], &[0.8]).unwrap();
        let mut buf = Vec::new();
        write_figure_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "E,omega,tau\n0.8,1000000000,1.10714871779e-9\n");
        let tau: f64 = text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
        assert!((tau - 1.107148717794e-9).abs() < 1e-20);
    }
}
