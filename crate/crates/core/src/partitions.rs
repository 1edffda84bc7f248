//! Set partitions of `{0, ..., K-1}` into exactly `m` nonempty blocks.

use crate::error::{Error, Result};
use crate::state::Partition;

/// Hard limit on the number of subsystems.
pub const MAX_SITES: usize = 12;

/// Above this many subsystems the enumeration is logged as expensive.
pub const WARN_SITES: usize = 8;

/// All partitions of `0..k` into exactly `m` blocks, in lexicographic order of
/// their restricted growth strings.
pub fn enumerate_partitions(k: usize, m: usize) -> Result<Vec<Partition>> {
    if m < 1 || m > k {
        return Err(Error::Domain(format!("need 1 <= m <= K, got m={m}, K={k}")));
    }
    if k > MAX_SITES {
        return Err(Error::Domain(format!(
            "K={k} exceeds the supported maximum of {MAX_SITES} subsystems"
        )));
    }
    if k > WARN_SITES {
        log::warn!("enumerating partitions of {k} subsystems into {m} blocks; count grows like the Bell numbers");
    }
    Ok(RgsIter::new(k, m).map(|rgs| Partition::from_rgs(&rgs).expect("valid rgs")).collect())
}

/// Restricted growth strings `a` of length `k` with `a[0] = 0`,
/// `a[i] <= 1 + max(a[..i])`, and maximum exactly `m - 1`.
struct RgsIter {
    k: usize,
    m: usize,
    current: Option<Vec<usize>>,
}

impl RgsIter {
    fn new(k: usize, m: usize) -> Self {
        // smallest string using m blocks: 0,0,...,0,1,2,...,m-1
        let mut first = vec![0; k];
        for (i, slot) in first[k - m..].iter_mut().enumerate() {
            *slot = i;
        }
        Self {
            k,
            m,
            current: Some(first),
        }
    }

    /// Lexicographic successor with maximum exactly `m - 1`, if any.
    fn advance(&self, a: &[usize]) -> Option<Vec<usize>> {
        let (k, m) = (self.k, self.m);
        let mut prefix_max = vec![0; k];
        for i in 1..k {
            prefix_max[i] = prefix_max[i - 1].max(a[i - 1]);
        }
        for i in (1..k).rev() {
            let cap = (prefix_max[i] + 1).min(m - 1);
            if a[i] < cap {
                let mut next = a[..i].to_vec();
                next.push(a[i] + 1);
                // fill the suffix with the smallest completion that still
                // reaches m blocks
                let mut used = next.iter().copied().max().unwrap_or(0) + 1;
                let remaining = k - next.len();
                if used + remaining < m {
                    continue;
                }
                for r in 0..remaining {
                    let still_needed = m - used;
                    let slots_left = remaining - r;
                    if still_needed > 0 && still_needed == slots_left {
                        next.push(used);
                        used += 1;
                    } else {
                        next.push(0);
                    }
                }
                return Some(next);
            }
        }
        None
    }
}

impl Iterator for RgsIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        self.current = self.advance(&cur);
        Some(cur)
    }
}
