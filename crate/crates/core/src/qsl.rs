//! Quantum speed limit for pure states under time-independent Hamiltonians,
//! and the two-level generator that saturates it.
//!
//! Internal units have ħ = 1: energies are angular frequencies and times are
//! their reciprocals.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::state::{dot, norm, PureState, C64};

/// `|<psi|phi>|` at or above `1 - DEGENERACY_TOL` means the states coincide
/// up to phase.
pub const DEGENERACY_TOL: f64 = 1e-12;

pub const HERMITIAN_TOL: f64 = 1e-10;

/// `e^{-i arg<psi|phi>} phi`, so that `<psi|phi'>` is real and non-negative.
/// Returned unchanged when the overlap is zero or already real positive.
pub fn phase_align(psi: &PureState, phi: &PureState) -> Result<PureState> {
    let ov = psi.inner(phi)?;
    let r = ov.norm();
    if r == 0.0 || (ov.im == 0.0 && ov.re > 0.0) {
        return Ok(phi.clone());
    }
    Ok(phi.with_phase(ov.conj() / r))
}

/// The normalized component of `phi` orthogonal to `psi`:
/// `(phi - <psi|phi> psi) / sqrt(1 - |<psi|phi>|^2)`.
pub fn orthogonal_complement(psi: &PureState, phi: &PureState) -> Result<PureState> {
    let ov = psi.inner(phi)?;
    if ov.norm() >= 1.0 - DEGENERACY_TOL {
        return Err(Error::DegeneratePair { overlap: ov.norm() });
    }
    let a = psi.amplitudes();
    let mut bar: Vec<C64> = phi
        .amplitudes()
        .iter()
        .zip(a)
        .map(|(p, s)| p - ov * s)
        .collect();
    // second Gram-Schmidt pass
    let resid = dot(a, &bar);
    if resid != C64::new(0.0, 0.0) {
        bar.iter_mut().zip(a).for_each(|(b, s)| *b -= resid * s);
    }
    let n = norm(&bar);
    bar.iter_mut().for_each(|b| *b /= n);
    PureState::new(psi.dims().to_vec(), bar)
}

/// `H_opt = -i ω (|psi><psi_bar| - |psi_bar><psi|)`, stored structurally.
///
/// On span{psi, psi_bar} it acts as `ω σ_y`; it annihilates the orthogonal
/// complement of that plane.
#[derive(Clone, Debug, PartialEq)]
pub struct OptHamiltonian {
    psi: PureState,
    psi_bar: PureState,
    omega: f64,
}

impl OptHamiltonian {
    pub fn psi(&self) -> &PureState {
        &self.psi
    }

    pub fn psi_bar(&self) -> &PureState {
        &self.psi_bar
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `H v` in O(dim).
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let i_omega = C64::new(0.0, self.omega);
        let on_bar = dot(self.psi_bar.amplitudes(), v);
        let on_psi = dot(self.psi.amplitudes(), v);
        self.psi
            .amplitudes()
            .iter()
            .zip(self.psi_bar.amplitudes())
            .map(|(s, b)| -i_omega * (s * on_bar - b * on_psi))
            .collect()
    }

    pub fn dense(&self) -> DenseHamiltonian {
        let s = DVector::from_column_slice(self.psi.amplitudes());
        let b = DVector::from_column_slice(self.psi_bar.amplitudes());
        let matrix = (&s * b.adjoint() - &b * s.adjoint()) * C64::new(0.0, -self.omega);
        DenseHamiltonian { matrix }
    }
}

/// Builds the generator rotating `psi` into (the phase-aligned) `phi` in the
/// shortest time allowed by the speed limit.
pub fn build_h_opt(psi: &PureState, phi: &PureState, omega: f64) -> Result<OptHamiltonian> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    let aligned = phase_align(psi, phi)?;
    let psi_bar = orthogonal_complement(psi, &aligned)?;
    Ok(OptHamiltonian {
        psi: psi.clone(),
        psi_bar,
        omega,
    })
}

/// `cos(ωt) psi + sin(ωt) psi_bar`, the exact solution of the Schrödinger
/// equation under `H_opt` starting from `psi`.
pub fn evolve_opt(h: &OptHamiltonian, t: f64) -> PureState {
    let (s, c) = (h.omega * t).sin_cos();
    let amps = h
        .psi
        .amplitudes()
        .iter()
        .zip(h.psi_bar.amplitudes())
        .map(|(a, b)| a * c + b * s)
        .collect();
    PureState::new(h.psi.dims().to_vec(), amps).expect("rotation preserves the norm")
}

/// `arccos(|<psi|phi>|) / ω`: the time `evolve_opt` needs to reach `phi`.
pub fn transit_time(psi: &PureState, phi: &PureState, omega: f64) -> Result<f64> {
    qsl_bound(psi, phi, omega)
}

/// A Hermitian matrix in energy units (ħ = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseHamiltonian {
    matrix: DMatrix<C64>,
}

impl DenseHamiltonian {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "Hamiltonian is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    /// Draws `(A + A^dagger) / 2` with i.i.d. standard complex Gaussian `A`.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        Self {
            matrix: (&a + a.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |H - H^dagger|` over entries.
    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn propagator(&self) -> Propagator {
        let eig = self.matrix.clone().symmetric_eigen();
        Propagator {
            energies: eig.eigenvalues.iter().copied().collect(),
            basis: eig.eigenvectors,
        }
    }

    fn apply(&self, v: &[C64]) -> Vec<C64> {
        (&self.matrix * DVector::from_column_slice(v)).iter().copied().collect()
    }

    fn check_dim(&self, psi: &PureState) -> Result<()> {
        if self.dim() != psi.dim() {
            return Err(Error::Shape(format!(
                "Hamiltonian of dimension {} vs state of dimension {}",
                self.dim(),
                psi.dim()
            )));
        }
        Ok(())
    }
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `exp(-iHt)` in the eigenbasis of `H`, reusable across times.
#[derive(Clone, Debug)]
pub struct Propagator {
    energies: Vec<f64>,
    basis: DMatrix<C64>,
}

impl Propagator {
    pub fn evolve(&self, psi: &PureState, t: f64) -> Result<PureState> {
        if self.basis.nrows() != psi.dim() {
            return Err(Error::Shape(format!(
                "propagator of dimension {} vs state of dimension {}",
                self.basis.nrows(),
                psi.dim()
            )));
        }
        let v = DVector::from_column_slice(psi.amplitudes());
        let mut coeffs = self.basis.adjoint() * v;
        for (c, &e) in coeffs.iter_mut().zip(&self.energies) {
            *c *= C64::from_polar(1.0, -e * t);
        }
        let out = &self.basis * coeffs;
        PureState::new(psi.dims().to_vec(), out.iter().copied().collect())
    }
}

/// `exp(-iHt) psi` via Hermitian eigendecomposition.
pub fn evolve_dense(h: &DenseHamiltonian, psi: &PureState, t: f64) -> Result<PureState> {
    h.check_dim(psi)?;
    h.propagator().evolve(psi, t)
}

/// Energy spread `sqrt(<H^2> - <H>^2)` of `psi`.
///
/// Evaluated as `|(H - <H>) psi|`, which is the same quantity without the
/// cancellation of the two-moment form.
pub fn variance(h: &DenseHamiltonian, psi: &PureState) -> Result<f64> {
    h.check_dim(psi)?;
    let hv = h.apply(psi.amplitudes());
    Ok(spread(psi.amplitudes(), &hv))
}

/// Energy spread of `psi` under `H_opt`, using the structural action.
pub fn variance_opt(h: &OptHamiltonian, psi: &PureState) -> Result<f64> {
    if h.psi.dims() != psi.dims() {
        return Err(Error::Shape("state does not match the Hamiltonian".into()));
    }
    let hv = h.apply(psi.amplitudes());
    Ok(spread(psi.amplitudes(), &hv))
}

fn spread(psi: &[C64], hv: &[C64]) -> f64 {
    let mean = dot(psi, hv).re;
    hv.iter()
        .zip(psi)
        .map(|(h, p)| (h - p * mean).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Mandelstam-Tamm bound `arccos(|<psi|phi>|) / ΔH` (ħ = 1).
pub fn qsl_bound(psi: &PureState, phi: &PureState, delta_h: f64) -> Result<f64> {
    if !(delta_h > 0.0) {
        return Err(Error::Domain(format!("energy spread must be positive, got {delta_h}")));
    }
    let ov = psi.inner(phi)?.norm().min(1.0);
    Ok(ov.acos() / delta_h)
}

/// Time-scan resolution used for first-passage checks: `π / (2000 ΔH)`.
pub fn scan_step(delta_h: f64) -> f64 {
    std::f64::consts::PI / (2000.0 * delta_h)
}

/// Earliest `t = k * step <= t_max` at which `|<phi|exp(-iHt) psi>|^2`
/// reaches `threshold`.
pub fn first_passage_time(
    prop: &Propagator,
    psi: &PureState,
    phi: &PureState,
    threshold: f64,
    step: f64,
    t_max: f64,
) -> Result<Option<f64>> {
    if !(step > 0.0) {
        return Err(Error::Domain(format!("scan step must be positive, got {step}")));
    }
    let steps = (t_max / step).floor() as usize;
    for k in 0..=steps {
        let t = k as f64 * step;
        let fidelity = phi.inner(&prop.evolve(psi, t)?)?.norm_sqr();
        if fidelity >= threshold {
            return Ok(Some(t));
        }
    }
    Ok(None)
}
