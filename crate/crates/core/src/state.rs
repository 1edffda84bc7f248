//! Multipartite pure states, set partitions of the subsystems, and product
//! states over those partitions.
//!
//! Amplitudes are stored row-major over the multi-index `(i_1, ..., i_K)`
//! with `i_1` varying slowest. A block of a partition may be non-contiguous;
//! its factor is indexed row-major over the block's sites in ascending order.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Norm deviation beyond which outputs are renormalized.
pub const NORM_TOL: f64 = 1e-12;

/// Contraction vectors shorter than this are treated as zero.
pub const DEGENERATE_TOL: f64 = 1e-14;

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn renormalize(v: &mut [C64]) -> Result<()> {
    let n = norm(v);
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidState(format!("norm is {n}")));
    }
    if (n - 1.0).abs() > NORM_TOL {
        v.iter_mut().for_each(|a| *a /= n);
    }
    Ok(())
}

/// A normalized vector in `H_1 ⊗ ... ⊗ H_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Builds a state, normalizing the amplitudes. Rejects subsystems of
    /// dimension below two, a length that does not match the dimensions, and
    /// zero or non-finite norm.
    pub fn new(dims: Vec<usize>, mut amplitudes: Vec<C64>) -> Result<Self> {
        validate_dims(&dims)?;
        let total: usize = dims.iter().product();
        if amplitudes.len() != total {
            return Err(Error::Shape(format!(
                "expected {total} amplitudes for dims {dims:?}, got {}",
                amplitudes.len()
            )));
        }
        renormalize(&mut amplitudes)?;
        Ok(Self { dims, amplitudes })
    }

    /// Computational basis state with the given digit per subsystem.
    pub fn basis(dims: &[usize], digits: &[usize]) -> Result<Self> {
        validate_dims(dims)?;
        if digits.len() != dims.len() || digits.iter().zip(dims).any(|(&i, &d)| i >= d) {
            return Err(Error::Shape(format!(
                "digits {digits:?} do not index dims {dims:?}"
            )));
        }
        let index = digits.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i);
        let mut amplitudes = vec![C64::new(0.0, 0.0); dims.iter().product()];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self {
            dims: dims.to_vec(),
            amplitudes,
        })
    }

    /// Real amplitudes, normalized on construction.
    pub fn from_real(dims: Vec<usize>, amplitudes: &[f64]) -> Result<Self> {
        Self::new(dims, amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        inner_product(self, other)
    }

    /// Multiplies every amplitude by `phase` (assumed unimodular).
    pub fn with_phase(&self, phase: C64) -> PureState {
        PureState {
            dims: self.dims.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }

    /// Applies `u` to subsystem `site`, leaving the others untouched.
    pub fn apply_local(&self, site: usize, u: &DMatrix<C64>) -> Result<PureState> {
        let d = *self
            .dims
            .get(site)
            .ok_or_else(|| Error::Shape(format!("site {site} out of range")))?;
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::Shape(format!(
                "operator is {}x{}, subsystem {site} has dimension {d}",
                u.nrows(),
                u.ncols()
            )));
        }
        let inner: usize = self.dims[site + 1..].iter().product();
        let outer: usize = self.dims[..site].iter().product();
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for o in 0..outer {
            for r in 0..inner {
                let at = |i: usize| (o * d + i) * inner + r;
                for i in 0..d {
                    out[at(i)] = (0..d).map(|j| u[(i, j)] * self.amplitudes[at(j)]).sum();
                }
            }
        }
        PureState::new(self.dims.clone(), out)
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, amplitudes: Vec<C64>) -> Self {
        Self { dims, amplitudes }
    }
}

fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::InvalidState("no subsystems".into()));
    }
    if let Some((i, &d)) = dims.iter().enumerate().find(|(_, &d)| d < 2) {
        return Err(Error::InvalidState(format!(
            "subsystem {i} has dimension {d}; every dimension must be at least 2"
        )));
    }
    Ok(())
}

/// `<a|b> = sum_i conj(a_i) b_i`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<C64> {
    if a.dims != b.dims {
        return Err(Error::Shape(format!(
            "dims {:?} vs {:?}",
            a.dims, b.dims
        )));
    }
    Ok(dot(&a.amplitudes, &b.amplitudes))
}

/// Draws a Haar-random pure state by normalizing i.i.d. standard complex
/// Gaussian amplitudes. Deterministic for a fixed seed.
pub fn haar_random_state(dims: &[usize], seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_state_with(dims, &mut rng)
}

pub fn haar_random_state_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    validate_dims(dims)?;
    let n: usize = dims.iter().product();
    let amplitudes = gaussian_vector(n, rng);
    PureState::new(dims.to_vec(), amplitudes)
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// A division of the subsystem indices `0..K` into disjoint nonempty blocks,
/// kept in canonical form: indices ascending within each block, blocks
/// ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(num_sites: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; num_sites];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &s in block.iter() {
                match seen.get_mut(s) {
                    None => {
                        return Err(Error::InvalidPartition(format!(
                            "index {s} outside 0..{num_sites}"
                        )))
                    }
                    Some(true) => {
                        return Err(Error::InvalidPartition(format!("index {s} repeated")))
                    }
                    Some(flag) => *flag = true,
                }
            }
        }
        if let Some(missing) = seen.iter().position(|&f| !f) {
            return Err(Error::InvalidPartition(format!("index {missing} not covered")));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { blocks })
    }

    /// Decodes a restricted growth string: element `i` goes to block `rgs[i]`.
    pub fn from_rgs(rgs: &[usize]) -> Result<Self> {
        let m = rgs.iter().max().map_or(0, |&x| x + 1);
        let mut blocks = vec![Vec::new(); m];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        Self::new(rgs.len(), blocks)
    }

    /// Every subsystem in its own block.
    pub fn finest(num_sites: usize) -> Self {
        Self {
            blocks: (0..num_sites).map(|i| vec![i]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &[usize] {
        &self.blocks[j]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_sites(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Subsystem dimensions of each block, in within-block order.
    pub fn block_dims(&self, dims: &[usize]) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&s| dims[s]).collect())
            .collect()
    }
}

impl fmt::Display for Partition {
    /// Canonical notation, e.g. `{0,2}|{1}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, block) in self.blocks.iter().enumerate() {
            if j > 0 {
                f.write_str("|")?;
            }
            f.write_str("{")?;
            for (i, s) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// Index bookkeeping for a partition over concrete subsystem dimensions: for
/// every full-space index, the sub-index inside each block.
#[derive(Clone, Debug)]
pub struct BlockLayout {
    block_sizes: Vec<usize>,
    num_blocks: usize,
    // row-major [full_index][block]
    sub: Vec<usize>,
}

impl BlockLayout {
    pub fn new(dims: &[usize], partition: &Partition) -> Result<Self> {
        if partition.num_sites() != dims.len() {
            return Err(Error::Shape(format!(
                "partition covers {} subsystems, state has {}",
                partition.num_sites(),
                dims.len()
            )));
        }
        let k = dims.len();
        let m = partition.num_blocks();
        let mut owner = vec![0; k];
        let mut weight = vec![0; k];
        let mut block_sizes = Vec::with_capacity(m);
        for (j, block) in partition.blocks().iter().enumerate() {
            let mut w = 1;
            for &s in block.iter().rev() {
                owner[s] = j;
                weight[s] = w;
                w *= dims[s];
            }
            block_sizes.push(w);
        }
        let total: usize = dims.iter().product();
        let mut sub = vec![0; total * m];
        let mut digits = vec![0; k];
        for idx in 0..total {
            let row = &mut sub[idx * m..(idx + 1) * m];
            for s in 0..k {
                row[owner[s]] += digits[s] * weight[s];
            }
            // odometer increment, last subsystem fastest
            for s in (0..k).rev() {
                digits[s] += 1;
                if digits[s] < dims[s] {
                    break;
                }
                digits[s] = 0;
            }
        }
        Ok(Self {
            block_sizes,
            num_blocks: m,
            sub,
        })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn full_dim(&self) -> usize {
        self.sub.len() / self.num_blocks
    }

    #[inline]
    pub fn sub_indices(&self, idx: usize) -> &[usize] {
        &self.sub[idx * self.num_blocks..(idx + 1) * self.num_blocks]
    }

    /// Full-space amplitudes of the tensor product of `factors`.
    pub fn assemble(&self, factors: &[&[C64]]) -> Vec<C64> {
        (0..self.full_dim())
            .map(|idx| {
                self.sub_indices(idx)
                    .iter()
                    .zip(factors)
                    .map(|(&s, f)| f[s])
                    .product()
            })
            .collect()
    }

    /// Contracts `psi` against the conjugates of every factor except block
    /// `j`; the result `v` satisfies `<product|psi> = <factor_j|v>`.
    pub fn contract_except(&self, psi: &[C64], factors: &[&[C64]], j: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.block_sizes[j]];
        for (idx, &amp) in psi.iter().enumerate() {
            let subs = self.sub_indices(idx);
            let mut w = amp;
            for (k, f) in factors.iter().enumerate() {
                if k != j {
                    w *= f[subs[k]].conj();
                }
            }
            v[subs[j]] += w;
        }
        v
    }

    /// `<product|psi>` for the given factors.
    pub fn overlap(&self, psi: &[C64], factors: &[&[C64]]) -> C64 {
        psi.iter()
            .enumerate()
            .map(|(idx, amp)| {
                let prod: C64 = self
                    .sub_indices(idx)
                    .iter()
                    .zip(factors)
                    .map(|(&s, f)| f[s])
                    .product();
                prod.conj() * amp
            })
            .sum()
    }
}

/// One normalized factor per block of a partition.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    partition: Partition,
    factors: Vec<PureState>,
}

impl ProductState {
    /// Each factor's dims must equal the subsystem dims of its block.
    pub fn new(partition: Partition, factors: Vec<PureState>) -> Result<Self> {
        if factors.len() != partition.num_blocks() {
            return Err(Error::Shape(format!(
                "{} factors for {} blocks",
                factors.len(),
                partition.num_blocks()
            )));
        }
        let mut dims = vec![0; partition.num_sites()];
        for (j, (block, f)) in partition.blocks().iter().zip(&factors).enumerate() {
            if f.dims().len() != block.len() {
                return Err(Error::Shape(format!(
                    "factor {j} spans {} subsystems, block {j} has {}",
                    f.dims().len(),
                    block.len()
                )));
            }
            for (&s, &d) in block.iter().zip(f.dims()) {
                dims[s] = d;
            }
        }
        Ok(Self { partition, factors })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn factors(&self) -> &[PureState] {
        &self.factors
    }

    /// Full-space subsystem dimensions implied by the factors.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![0; self.partition.num_sites()];
        for (block, f) in self.partition.blocks().iter().zip(&self.factors) {
            for (&s, &d) in block.iter().zip(f.dims()) {
                dims[s] = d;
            }
        }
        dims
    }

    pub(crate) fn factor_slices(&self) -> Vec<&[C64]> {
        self.factors.iter().map(PureState::amplitudes).collect()
    }
}

/// Tensor product of the factors, permuted back to the original subsystem
/// ordering.
pub fn assemble(p: &ProductState) -> PureState {
    let dims = p.dims();
    let layout = BlockLayout::new(&dims, &p.partition).expect("product state is self-consistent");
    let mut amps = layout.assemble(&p.factor_slices());
    // factors are normalized, so this only repairs rounding drift
    renormalize(&mut amps).expect("product of normalized factors");
    PureState::from_parts_unchecked(dims, amps)
}

/// Unnormalized vector `v` over block `j` with
/// `<assemble(p)|psi> = <factor_j|v>`. The factor maximizing the overlap with
/// the others held fixed is `v / |v|`.
pub fn contract_except(psi: &PureState, p: &ProductState, j: usize) -> Result<Vec<C64>> {
    if p.dims() != psi.dims {
        return Err(Error::Shape(format!(
            "product over {:?} vs state over {:?}",
            p.dims(),
            psi.dims
        )));
    }
    if j >= p.partition.num_blocks() {
        return Err(Error::Shape(format!("block {j} out of range")));
    }
    let layout = BlockLayout::new(&psi.dims, &p.partition)?;
    let v = layout.contract_except(&psi.amplitudes, &p.factor_slices(), j);
    if norm(&v) < DEGENERATE_TOL {
        return Err(Error::DegenerateContraction { block: j });
    }
    Ok(v)
}

/// Reshapes `psi` into a matrix with rows indexed by the sites in `rows`
/// (ascending, row-major) and columns by the remaining sites.
pub fn matricize(psi: &PureState, rows: &[usize]) -> Result<DMatrix<C64>> {
    let k = psi.num_subsystems();
    let rest: Vec<usize> = (0..k).filter(|s| !rows.contains(s)).collect();
    if rest.is_empty() {
        return Ok(DMatrix::from_column_slice(psi.dim(), 1, psi.amplitudes()));
    }
    let partition = Partition::new(k, vec![rows.to_vec(), rest])?;
    let layout = BlockLayout::new(psi.dims(), &partition)?;
    // canonical order puts the block holding site 0 first
    let (ri, ci) = if partition.block(0).contains(&rows[0]) {
        (0, 1)
    } else {
        (1, 0)
    };
    let sizes = layout.block_sizes();
    let mut mat = DMatrix::zeros(sizes[ri], sizes[ci]);
    for (idx, &a) in psi.amplitudes().iter().enumerate() {
        let s = layout.sub_indices(idx);
        mat[(s[ri], s[ci])] = a;
    }
    Ok(mat)
}

/// SplitMix64-style mixing of a base seed with two stream coordinates.
pub(crate) fn stream_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base
        ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03).rotate_left(17);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
