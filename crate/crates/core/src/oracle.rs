//! Reference maximizers of `|<psi|phi>|` over product states, written
//! independently of the optimizer so they can certify it on small systems.
//!
//! * [`schmidt_overlap`] is exact for bipartitions: the largest singular
//!   value of the block-versus-block matricization.
//! * [`brute_force_overlap`] handles any partition with block dimensions up
//!   to 4 by exhaustive search over a grid of factor parameters. The largest
//!   block is optimized in closed form for each grid point (its best factor
//!   is the normalized contraction), and the best grid point is polished
//!   with a fixed number of alternating sweeps.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::partitions::enumerate_partitions;
use crate::state::{Partition, PureState, C64};

/// Largest composite block dimension the grid oracle accepts.
pub const MAX_BLOCK_DIM: usize = 4;

pub const MIN_RESOLUTION: usize = 16;

/// Upper limit on grid points per call.
pub const MAX_GRID_POINTS: u64 = 400_000_000;

const REFINE_SWEEPS: usize = 100;

/// Grid resolution: 64 when every subsystem is a qubit, 32 otherwise.
pub fn default_resolution(psi: &PureState) -> usize {
    if psi.dims().iter().all(|&d| d == 2) {
        64
    } else {
        32
    }
}

/// Amplitudes rearranged as a dense tensor over block sub-indices, axes in
/// the requested block order, row-major.
struct BlockTensor {
    shape: Vec<usize>,
    data: Vec<C64>,
}

impl BlockTensor {
    fn new(psi: &PureState, p: &Partition, order: &[usize]) -> Result<Self> {
        let dims = psi.dims();
        if p.num_sites() != dims.len() {
            return Err(Error::Shape(format!(
                "partition covers {} subsystems, state has {}",
                p.num_sites(),
                dims.len()
            )));
        }
        let shape: Vec<usize> = order
            .iter()
            .map(|&j| p.block(j).iter().map(|&s| dims[s]).product())
            .collect();
        let mut data = vec![C64::new(0.0, 0.0); psi.dim()];
        let mut digits = vec![0usize; dims.len()];
        for (flat, &amp) in psi.amplitudes().iter().enumerate() {
            let mut rem = flat;
            for s in (0..dims.len()).rev() {
                digits[s] = rem % dims[s];
                rem /= dims[s];
            }
            let target = order.iter().zip(&shape).fold(0, |acc, (&j, &size)| {
                let sub = p.block(j).iter().fold(0, |a, &s| a * dims[s] + digits[s]);
                acc * size + sub
            });
            data[target] = amp;
        }
        Ok(Self { shape, data })
    }

    /// Contracts the leading axis with `conj(f)`.
    fn contract_front(data: &[C64], f: &[C64]) -> Vec<C64> {
        let rest = data.len() / f.len();
        let mut out = vec![C64::new(0.0, 0.0); rest];
        for (i, fi) in f.iter().enumerate() {
            let c = fi.conj();
            for (o, d) in out.iter_mut().zip(&data[i * rest..(i + 1) * rest]) {
                *o += c * d;
            }
        }
        out
    }

    /// Contracts every axis except `keep` with the conjugated factors.
    fn contract_all_but(&self, factors: &[Vec<C64>], keep: usize) -> Vec<C64> {
        let n = self.shape.len();
        let mut out = vec![C64::new(0.0, 0.0); self.shape[keep]];
        let mut idx = vec![0usize; n];
        for &amp in &self.data {
            let mut w = amp;
            for (axis, &i) in idx.iter().enumerate() {
                if axis != keep {
                    w *= factors[axis][i].conj();
                }
            }
            out[idx[keep]] += w;
            for axis in (0..n).rev() {
                idx[axis] += 1;
                if idx[axis] < self.shape[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        out
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Unit vectors of dimension `d` on the angle grid: `d - 1` polar angles in
/// `[0, π/2]` (endpoints included) fix the magnitudes, `d - 1` phases in
/// `[0, 2π)` fix the relative phases; the first amplitude is real.
fn grid_vectors(d: usize, resolution: usize) -> Vec<Vec<C64>> {
    let n_angles = 2 * d - 2;
    let polar = |i: usize| i as f64 / (resolution - 1) as f64 * std::f64::consts::FRAC_PI_2;
    let azimuth = |i: usize| i as f64 / resolution as f64 * std::f64::consts::TAU;
    let count = resolution.pow(n_angles as u32);
    let mut out = Vec::with_capacity(count);
    let mut ticks = vec![0usize; n_angles];
    for _ in 0..count {
        let mut mags = vec![0.0; d];
        let mut carry = 1.0;
        for k in 0..d - 1 {
            let (s, c) = polar(ticks[k]).sin_cos();
            mags[k] = carry * c;
            carry *= s;
        }
        mags[d - 1] = carry;
        let v = (0..d)
            .map(|k| {
                if k == 0 {
                    C64::new(mags[0], 0.0)
                } else {
                    C64::from_polar(mags[k], azimuth(ticks[d - 1 + k - 1]))
                }
            })
            .collect();
        out.push(v);
        for t in ticks.iter_mut().rev() {
            *t += 1;
            if *t < resolution {
                break;
            }
            *t = 0;
        }
    }
    out
}

/// Grid search plus refinement for `max |<psi|phi>|` over product states on
/// partition `p`. The returned value is attained by an explicit product
/// state, so it never exceeds the true maximum.
pub fn brute_force_overlap(psi: &PureState, p: &Partition, resolution: usize) -> Result<f64> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Domain(format!(
            "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let block_dims: Vec<usize> = p
        .blocks()
        .iter()
        .map(|b| b.iter().map(|&s| psi.dims()[s]).product())
        .collect();
    if let Some(&big) = block_dims.iter().find(|&&d| d > MAX_BLOCK_DIM) {
        return Err(Error::OracleScale(format!(
            "block dimension {big} exceeds {MAX_BLOCK_DIM}"
        )));
    }
    // the largest block (last on ties) is solved in closed form
    let elim = (0..block_dims.len())
        .rev()
        .max_by_key(|&j| block_dims[j])
        .expect("nonempty partition");
    let mut order: Vec<usize> = (0..block_dims.len()).filter(|&j| j != elim).collect();
    order.push(elim);
    let tensor = BlockTensor::new(psi, p, &order)?;

    let grid_blocks = &order[..order.len() - 1];
    let points = grid_blocks.iter().try_fold(1u64, |acc, &j| {
        acc.checked_mul((resolution as u64).checked_pow(2 * block_dims[j] as u32 - 2)?)
    });
    match points {
        Some(n) if n <= MAX_GRID_POINTS => {}
        _ => {
            return Err(Error::OracleScale(format!(
                "grid of resolution {resolution} over {} factors is too large",
                grid_blocks.len()
            )))
        }
    }
    let grids: Vec<Vec<Vec<C64>>> = grid_blocks
        .iter()
        .map(|&j| grid_vectors(block_dims[j], resolution))
        .collect();

    let (grid_value, choice) = grid_search(&tensor.data, &grids);

    let mut factors: Vec<Vec<C64>> = choice
        .iter()
        .zip(&grids)
        .map(|(&i, g)| g[i].clone())
        .collect();
    let tail = factors
        .iter()
        .fold(tensor.data.clone(), |acc, f| BlockTensor::contract_front(&acc, f));
    let n = vec_norm(&tail);
    factors.push(if n > 0.0 {
        tail.iter().map(|a| a / n).collect()
    } else {
        let mut e = vec![C64::new(0.0, 0.0); tensor.shape[order.len() - 1]];
        e[0] = C64::new(1.0, 0.0);
        e
    });

    let mut refined = grid_value;
    for _ in 0..REFINE_SWEEPS {
        for axis in 0..factors.len() {
            let v = tensor.contract_all_but(&factors, axis);
            let nv = vec_norm(&v);
            if nv > 0.0 {
                factors[axis] = v.iter().map(|a| a / nv).collect();
                refined = refined.max(nv);
            }
        }
    }
    Ok(refined.min(1.0))
}

/// Best `|contraction|` over the grid, with the lexicographically smallest
/// grid-index tuple among exact ties.
fn grid_search(data: &[C64], grids: &[Vec<Vec<C64>>]) -> (f64, Vec<usize>) {
    if grids.is_empty() {
        return (vec_norm(data), Vec::new());
    }
    let top = |i: usize| {
        let partial = BlockTensor::contract_front(data, &grids[0][i]);
        let mut best = (f64::NEG_INFINITY, Vec::new());
        let mut path = vec![i];
        descend(&partial, &grids[1..], &mut path, &mut best);
        best
    };
    let better = |a: (f64, Vec<usize>), b: (f64, Vec<usize>)| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let init = (f64::NEG_INFINITY, Vec::new());
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..grids[0].len())
            .into_par_iter()
            .map(top)
            .reduce(|| init.clone(), better)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..grids[0].len()).map(top).fold(init, better)
    }
}

fn descend(data: &[C64], grids: &[Vec<Vec<C64>>], path: &mut Vec<usize>, best: &mut (f64, Vec<usize>)) {
    match grids.split_first() {
        None => {
            let value = vec_norm(data);
            if value > best.0 {
                *best = (value, path.clone());
            }
        }
        Some((grid, rest)) => {
            for (i, f) in grid.iter().enumerate() {
                let partial = BlockTensor::contract_front(data, f);
                path.push(i);
                descend(&partial, rest, path, best);
                path.pop();
            }
        }
    }
}

/// Exact `max |<psi|phi>|` over product states of a bipartition: the largest
/// singular value of the block-A by block-B amplitude matrix.
pub fn schmidt_overlap(psi: &PureState, bipartition: &Partition) -> Result<f64> {
    if bipartition.num_blocks() != 2 {
        return Err(Error::Domain(format!(
            "Schmidt oracle needs exactly 2 blocks, got {}",
            bipartition.num_blocks()
        )));
    }
    let tensor = BlockTensor::new(psi, bipartition, &[0, 1])?;
    let m = DMatrix::from_row_slice(tensor.shape[0], tensor.shape[1], &tensor.data);
    let sv = m.singular_values();
    Ok(sv.iter().copied().fold(0.0, f64::max))
}

/// `1 - overlap^2` maximized over all partitions into `m` blocks, using the
/// exact oracle for `m = 2` and the grid oracle otherwise.
pub fn oracle_entanglement(psi: &PureState, m: usize, resolution: usize) -> Result<f64> {
    let best = enumerate_partitions(psi.num_subsystems(), m)?
        .iter()
        .map(|p| {
            if m == 2 {
                schmidt_overlap(psi, p)
            } else {
                brute_force_overlap(psi, p, resolution)
            }
        })
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))?;
    Ok((1.0 - best * best).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::haar_random_state;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> PureState {
        PureState::from_real(vec![2, 2], &[1., 0., 0., 1.]).unwrap()
    }

    fn w3() -> PureState {
        PureState::from_real(vec![2; 3], &[0., 1., 1., 0., 1., 0., 0., 0.]).unwrap()
    }

    #[test]
    fn grid_vectors_are_unit_and_cover_basis_states() {
        let g = grid_vectors(3, 16);
        assert_eq!(g.len(), 16usize.pow(4));
        for v in &g {
            assert_abs_diff_eq!(vec_norm(v), 1.0, epsilon = 1e-14);
        }
        assert!(g.iter().any(|v| (v[0] - C64::new(1.0, 0.0)).norm() < 1e-15));
        assert!(g.iter().any(|v| (v[2].norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn bell_grid_matches_schmidt() {
        let p = Partition::finest(2);
        let grid = brute_force_overlap(&bell(), &p, 64).unwrap();
        let exact = schmidt_overlap(&bell(), &p).unwrap();
        assert_abs_diff_eq!(exact, FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(grid, 0.70711, epsilon = 1e-4);
    }

    #[test]
    fn product_state_is_one() {
        let psi = PureState::basis(&[2, 2], &[0, 0]).unwrap();
        let p = Partition::finest(2);
        assert_abs_diff_eq!(brute_force_overlap(&psi, &p, 16).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(schmidt_overlap(&psi, &p).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn w_state_values() {
        let full = brute_force_overlap(&w3(), &Partition::finest(3), 48).unwrap();
        assert_abs_diff_eq!(full, 2.0 / 3.0, epsilon = 1e-3);
        let bip = Partition::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        let s = schmidt_overlap(&w3(), &bip).unwrap();
        assert_abs_diff_eq!(s, (2.0f64 / 3.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn grid_agrees_with_schmidt_on_bipartitions() {
        for seed in 0..4 {
            let psi = haar_random_state(&[2, 2, 2], seed).unwrap();
            for p in enumerate_partitions(3, 2).unwrap() {
                let g = brute_force_overlap(&psi, &p, 32).unwrap();
                let s = schmidt_overlap(&psi, &p).unwrap();
                assert_abs_diff_eq!(g, s, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn qutrit_blocks() {
        let psi = haar_random_state(&[3, 2], 4).unwrap();
        assert_eq!(default_resolution(&psi), 32);
        let p = Partition::finest(2);
        let g = brute_force_overlap(&psi, &p, 32).unwrap();
        let s = schmidt_overlap(&psi, &p).unwrap();
        assert_abs_diff_eq!(g, s, epsilon = 1e-4);
    }

    #[test]
    fn errors() {
        let psi = haar_random_state(&[3, 2], 4).unwrap();
        assert!(brute_force_overlap(&psi, &Partition::finest(2), 8).is_err());
        let big = haar_random_state(&[3, 2, 2], 4).unwrap();
        let p = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert!(matches!(brute_force_overlap(&big, &p, 16), Err(Error::OracleScale(_))));
        assert!(schmidt_overlap(&big, &Partition::finest(3)).is_err());
    }
}
