//! Maximal overlap of a state with m-separable product states, and the
//! geometric measures of entanglement built from it.
//!
//! For a fixed partition the maximization is a rank-1 approximation of the
//! amplitude tensor regrouped by blocks. It is solved by alternating updates:
//! with all factors but one held fixed, the optimal remaining factor is the
//! normalized contraction of the state against the others. Each update can
//! only increase the overlap, but the scheme may stall in a local maximum, so
//! it is restarted from a spectral seed and from Haar-random factors.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::enumerate_partitions;
use crate::state::{
    gaussian_vector, matricize, norm, stream_seed, BlockLayout, Partition, ProductState, PureState,
    C64, DEGENERATE_TOL,
};

/// Negative values of `1 - overlap^2` down to this are rounding and clamp to 0.
pub const CLAMP_FLOOR: f64 = -1e-9;

/// Two partitions whose overlaps differ by less than this are tied.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub restarts: usize,
    /// Maximum number of full sweeps per restart.
    pub max_iters: usize,
    /// A restart stops once one sweep raises the overlap by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 1000,
            tol: 1e-10,
            seed: 0,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::Domain("restarts must be at least 1".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::Domain("max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapResult {
    /// `|<psi|assemble(product)>|`.
    pub overlap: f64,
    pub product: ProductState,
    pub partition: Partition,
    /// Sweeps used by the restart that produced `product`.
    pub iterations_used: usize,
    /// True when at least one restart met the tolerance.
    pub converged: bool,
}

/// One run of alternating updates from a fixed starting point.
#[derive(Clone, Debug)]
pub struct AscentRun {
    pub product: ProductState,
    pub overlap: f64,
    pub sweeps: usize,
    pub converged: bool,
    /// Overlap before any update, then after every single-factor update.
    pub history: Vec<f64>,
}

/// Alternating maximization of `|<psi|product>|` starting from `initial`.
///
/// A factor whose contraction vanishes is redrawn from `rng`; this leaves the
/// overlap at zero, so the history stays non-decreasing.
pub fn alternating_ascent<R: Rng + ?Sized>(
    psi: &PureState,
    initial: &ProductState,
    max_iters: usize,
    tol: f64,
    rng: &mut R,
) -> Result<AscentRun> {
    if initial.dims() != psi.dims() {
        return Err(Error::Shape(format!(
            "product over {:?} vs state over {:?}",
            initial.dims(),
            psi.dims()
        )));
    }
    let partition = initial.partition().clone();
    let layout = BlockLayout::new(psi.dims(), &partition)?;
    let factors = initial
        .factors()
        .iter()
        .map(|f| f.amplitudes().to_vec())
        .collect();
    let run = ascend(psi.amplitudes(), &layout, factors, max_iters, tol, rng);
    Ok(run.into_result(psi, &partition, &layout))
}

struct RawRun {
    factors: Vec<Vec<C64>>,
    sweeps: usize,
    converged: bool,
    history: Vec<f64>,
}

impl RawRun {
    fn into_result(self, psi: &PureState, partition: &Partition, layout: &BlockLayout) -> AscentRun {
        let block_dims = partition.block_dims(psi.dims());
        let factors: Vec<PureState> = self
            .factors
            .into_iter()
            .zip(block_dims)
            .map(|(f, d)| PureState::new(d, f).expect("factor is normalized"))
            .collect();
        let slices: Vec<&[C64]> = factors.iter().map(PureState::amplitudes).collect();
        let overlap = layout.overlap(psi.amplitudes(), &slices).norm();
        AscentRun {
            product: ProductState::new(partition.clone(), factors).expect("factor dims"),
            overlap,
            sweeps: self.sweeps,
            converged: self.converged,
            history: self.history,
        }
    }
}

fn ascend<R: Rng + ?Sized>(
    psi: &[C64],
    layout: &BlockLayout,
    mut factors: Vec<Vec<C64>>,
    max_iters: usize,
    tol: f64,
    rng: &mut R,
) -> RawRun {
    let current = |fs: &Vec<Vec<C64>>| {
        let slices: Vec<&[C64]> = fs.iter().map(Vec::as_slice).collect();
        layout.overlap(psi, &slices).norm()
    };
    let mut overlap = current(&factors);
    let mut history = vec![overlap];
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_iters {
        let before = overlap;
        for j in 0..layout.num_blocks() {
            let v = {
                let slices: Vec<&[C64]> = factors.iter().map(Vec::as_slice).collect();
                layout.contract_except(psi, &slices, j)
            };
            let n = norm(&v);
            if n < DEGENERATE_TOL {
                factors[j] = random_unit(layout.block_sizes()[j], rng);
            } else {
                factors[j] = v.into_iter().map(|a| a / n).collect();
                overlap = n;
            }
            history.push(overlap);
        }
        sweeps += 1;
        if overlap - before < tol {
            converged = true;
            break;
        }
    }
    RawRun {
        factors,
        sweeps,
        converged,
        history,
    }
}

fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v = gaussian_vector(n, rng);
        let nv = norm(&v);
        if nv > 0.0 {
            return v.into_iter().map(|a| a / nv).collect();
        }
    }
}

/// Dominant left singular vector of the block-versus-rest matricization,
/// taken as the top eigenvector of `M M^dagger`.
fn spectral_seed(psi: &PureState, block: &[usize]) -> Result<Vec<C64>> {
    let m: DMatrix<C64> = matricize(psi, block)?;
    let gram = &m * m.adjoint();
    let eig = gram.symmetric_eigen();
    let top = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x > eig.eigenvalues[best] { i } else { best });
    Ok(eig.eigenvectors.column(top).iter().copied().collect())
}

/// Stable per-partition stream coordinate: the restricted growth string read
/// as a base-K number.
fn partition_code(p: &Partition) -> u64 {
    let k = p.num_sites();
    let mut rgs = vec![0u64; k];
    for (j, block) in p.blocks().iter().enumerate() {
        for &s in block {
            rgs[s] = j as u64;
        }
    }
    rgs.iter().fold(0u64, |acc, &x| acc.wrapping_mul(k as u64).wrapping_add(x))
}

/// Best overlap of `psi` with product states over the fixed partition `p`.
///
/// Restart 0 starts from spectral seeds, the rest from Haar-random factors.
/// Random streams depend only on `(cfg.seed, p, restart)`.
pub fn max_overlap_for_partition(
    psi: &PureState,
    p: &Partition,
    cfg: &OptConfig,
) -> Result<OverlapResult> {
    cfg.validate()?;
    let layout = BlockLayout::new(psi.dims(), p)?;
    let code = partition_code(p);
    let mut best: Option<(f64, RawRun)> = None;
    let mut any_converged = false;
    for restart in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, code, restart as u64));
        let init: Vec<Vec<C64>> = if restart == 0 {
            p.blocks()
                .iter()
                .map(|b| spectral_seed(psi, b))
                .collect::<Result<_>>()?
        } else {
            layout
                .block_sizes()
                .iter()
                .map(|&n| random_unit(n, &mut rng))
                .collect()
        };
        let run = ascend(psi.amplitudes(), &layout, init, cfg.max_iters, cfg.tol, &mut rng);
        any_converged |= run.converged;
        let value = *run.history.last().expect("history is never empty");
        if best.as_ref().map_or(true, |(b, _)| value > *b) {
            best = Some((value, run));
        }
    }
    let (_, run) = best.expect("at least one restart");
    let done = run.into_result(psi, p, &layout);
    Ok(OverlapResult {
        overlap: done.overlap,
        product: done.product,
        partition: p.clone(),
        iterations_used: done.sweeps,
        converged: any_converged,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricEntanglement {
    pub m: usize,
    /// `1 - overlap^2`, clamped to `[0, 1]`.
    pub value: f64,
    pub best: OverlapResult,
}

/// `E_m = 1 - (max over m-separable phi of |<psi|phi>|)^2`, maximizing over
/// every partition into exactly `m` blocks. Among partitions whose overlaps
/// agree to 1e-12 the first in canonical order is reported.
pub fn geometric_entanglement(
    psi: &PureState,
    m: usize,
    cfg: &OptConfig,
) -> Result<GeometricEntanglement> {
    let k = psi.num_subsystems();
    if m < 2 || m > k {
        return Err(Error::Domain(format!("m must lie in [2, {k}], got {m}")));
    }
    cfg.validate()?;
    let partitions = enumerate_partitions(k, m)?;
    let results = map_partitions(&partitions, |p| max_overlap_for_partition(psi, p, cfg));
    let mut best: Option<OverlapResult> = None;
    for r in results {
        let r = r?;
        if best.as_ref().map_or(true, |b| r.overlap > b.overlap + TIE_TOL) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one partition");
    let value = clamp_entanglement(1.0 - best.overlap * best.overlap)?;
    Ok(GeometricEntanglement { m, value, best })
}

/// `E_m` for every `m = 2..=K`.
pub fn entanglement_hierarchy(psi: &PureState, cfg: &OptConfig) -> Result<Vec<GeometricEntanglement>> {
    (2..=psi.num_subsystems())
        .map(|m| geometric_entanglement(psi, m, cfg))
        .collect()
}

pub(crate) fn clamp_entanglement(e: f64) -> Result<f64> {
    if e < CLAMP_FLOOR {
        return Err(Error::Consistency(format!(
            "1 - overlap^2 = {e:e} is below the rounding floor"
        )));
    }
    Ok(e.clamp(0.0, 1.0))
}

#[cfg(feature = "parallel")]
fn map_partitions<T, F>(partitions: &[Partition], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&Partition) -> T + Sync + Send,
{
    use rayon::prelude::*;
    partitions.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_partitions<T, F>(partitions: &[Partition], f: F) -> Vec<T>
where
    F: Fn(&Partition) -> T,
{
    partitions.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{assemble, haar_random_state};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> PureState {
        PureState::from_real(vec![2, 2], &[1., 0., 0., 1.]).unwrap()
    }

    fn ghz3() -> PureState {
        PureState::from_real(vec![2; 3], &[1., 0., 0., 0., 0., 0., 0., 1.]).unwrap()
    }

    fn w3() -> PureState {
        PureState::from_real(vec![2; 3], &[0., 1., 1., 0., 1., 0., 0., 0.]).unwrap()
    }

    #[test]
    fn product_input_has_unit_overlap() {
        let psi = PureState::basis(&[2, 2, 2], &[0, 0, 0]).unwrap();
        for m in 1..=3 {
            for p in enumerate_partitions(3, m).unwrap() {
                let r = max_overlap_for_partition(&psi, &p, &OptConfig::default()).unwrap();
                assert_abs_diff_eq!(r.overlap, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bell_and_ghz_bipartitions() {
        let cfg = OptConfig::default();
        let r = max_overlap_for_partition(&bell(), &Partition::finest(2), &cfg).unwrap();
        assert_abs_diff_eq!(r.overlap, FRAC_1_SQRT_2, epsilon = 1e-8);
        let p = Partition::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        let r = max_overlap_for_partition(&ghz3(), &p, &cfg).unwrap();
        assert_abs_diff_eq!(r.overlap, FRAC_1_SQRT_2, epsilon = 1e-8);
        assert!(r.converged);
    }

    #[test]
    fn known_entanglement_values() {
        let cfg = OptConfig::default();
        assert_abs_diff_eq!(geometric_entanglement(&bell(), 2, &cfg).unwrap().value, 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(geometric_entanglement(&w3(), 3, &cfg).unwrap().value, 5.0 / 9.0, epsilon = 1e-6);
        assert_abs_diff_eq!(geometric_entanglement(&w3(), 2, &cfg).unwrap().value, 1.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn reported_overlap_matches_assembled_product() {
        let psi = haar_random_state(&[2, 3, 2], 21).unwrap();
        let g = geometric_entanglement(&psi, 3, &OptConfig::default()).unwrap();
        let direct = psi.inner(&assemble(&g.best.product)).unwrap().norm();
        assert_abs_diff_eq!(g.best.overlap, direct, epsilon = 1e-10);
    }

    #[test]
    fn ghz_ties_resolve_to_first_partition() {
        let g = geometric_entanglement(&ghz3(), 2, &OptConfig::default()).unwrap();
        assert_eq!(g.best.partition.to_string(), "{0,1}|{2}");
    }

    #[test]
    fn ascent_history_is_monotone() {
        let psi = haar_random_state(&[2, 2, 2, 2], 3).unwrap();
        let partition = Partition::finest(4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let factors = (0..4).map(|s| haar_random_state(&[2], 100 + s).unwrap()).collect();
        let start = ProductState::new(partition, factors).unwrap();
        let run = alternating_ascent(&psi, &start, 500, 1e-14, &mut rng).unwrap();
        for w in run.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn degenerate_start_is_rerandomized() {
        // <1|psi-part> vanishes for every update of block 0 until block 1 moves
        let psi = PureState::basis(&[2, 2], &[0, 0]).unwrap();
        let start = ProductState::new(
            Partition::finest(2),
            vec![PureState::basis(&[2], &[1]).unwrap(), PureState::basis(&[2], &[1]).unwrap()],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let run = alternating_ascent(&psi, &start, 100, 1e-12, &mut rng).unwrap();
        assert_abs_diff_eq!(run.overlap, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn starved_optimizer_reports_non_convergence() {
        let psi = haar_random_state(&[2, 2, 2], 5).unwrap();
        let cfg = OptConfig {
            restarts: 2,
            max_iters: 1,
            tol: 1e-15,
            seed: 0,
        };
        let r = max_overlap_for_partition(&psi, &Partition::finest(3), &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations_used, 1);
    }

    #[test]
    fn domain_and_config_errors() {
        let cfg = OptConfig::default();
        assert!(geometric_entanglement(&bell(), 1, &cfg).is_err());
        assert!(geometric_entanglement(&bell(), 3, &cfg).is_err());
        let bad = OptConfig { tol: 0.0, ..cfg };
        assert!(geometric_entanglement(&bell(), 2, &bad).is_err());
        let bad = OptConfig { restarts: 0, ..cfg };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn clamping() {
        assert_eq!(clamp_entanglement(-5e-10).unwrap(), 0.0);
        assert!(clamp_entanglement(-1e-6).is_err());
        assert_eq!(clamp_entanglement(0.3).unwrap(), 0.3);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let psi = haar_random_state(&[2, 2, 2], 77).unwrap();
        let cfg = OptConfig { seed: 4, ..OptConfig::default() };
        let a = geometric_entanglement(&psi, 3, &cfg).unwrap();
        let b = geometric_entanglement(&psi, 3, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
