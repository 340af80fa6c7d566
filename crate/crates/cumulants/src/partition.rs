//! Set partitions of `{0, …, n−1}` and their Möbius weights.

use crate::{CumulantError, Result};

/// Largest ground-set size accepted by [`partitions_of`] / [`visit_partitions`].
///
/// The count of set partitions grows super-exponentially (4 213 597 at
/// n = 12); materializing the n = 12 list costs hundreds of megabytes, so
/// callers at the top of the range should prefer [`visit_partitions`].
pub const MAX_PARTITION_N: usize = 12;

/// A set partition of `{0, …, n−1}` in canonical form: every block is sorted
/// ascending and blocks are ordered by their least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    n: usize,
}

impl Partition {
    /// Builds a partition from `blocks`, canonicalizing the order and
    /// validating that the blocks are non-empty, pairwise disjoint, and cover
    /// `0..n` exactly.
    pub fn new(blocks: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut canon: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                return Err(CumulantError::InvalidArgument(
                    "partition blocks must be non-empty".into(),
                ));
            }
            block.sort_unstable();
            for &e in &block {
                if e >= n {
                    return Err(CumulantError::InvalidArgument(format!(
                        "element {e} outside ground set of size {n}"
                    )));
                }
                if seen[e] {
                    return Err(CumulantError::InvalidArgument(format!(
                        "element {e} appears in two blocks"
                    )));
                }
                seen[e] = true;
            }
            canon.push(block);
        }
        if seen.iter().any(|&s| !s) {
            return Err(CumulantError::InvalidArgument(
                "blocks do not cover the ground set".into(),
            ));
        }
        canon.sort_by_key(|b| b[0]);
        Ok(Self { blocks: canon, n })
    }

    /// The partition of `0..n` into a single block.
    pub fn one_block(n: usize) -> Self {
        Self {
            blocks: vec![(0..n).collect()],
            n,
        }
    }

    /// The partition of `0..n` into n singletons.
    pub fn singletons(n: usize) -> Self {
        Self {
            blocks: (0..n).map(|e| vec![e]).collect(),
            n,
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    /// Index (within `blocks()`) of the block containing `element`.
    pub fn block_of(&self, element: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&element))
    }

    /// Whether every block of `self` is contained in some block of `other`
    /// (`self` is finer than or equal to `other`).
    pub fn refines(&self, other: &Partition) -> bool {
        if self.n != other.n {
            return false;
        }
        let mut owner = vec![usize::MAX; self.n];
        for (bi, block) in other.blocks.iter().enumerate() {
            for &e in block {
                owner[e] = bi;
            }
        }
        self.blocks
            .iter()
            .all(|block| block.iter().all(|&e| owner[e] == owner[block[0]]))
    }
}

/// Calls `visit` once for every set partition of `{0, …, n−1}`, in
/// lexicographic restricted-growth-string order (the all-in-one-block
/// partition first, all singletons last). The slice passed to `visit` is in
/// canonical form: blocks ordered by least element, each block ascending.
///
/// This is the allocation-free core of [`partitions_of`]; use it directly
/// when only a fold over the partitions is needed.
pub fn visit_partitions<F: FnMut(&[Vec<usize>])>(n: usize, mut visit: F) -> Result<()> {
    if n == 0 || n > MAX_PARTITION_N {
        return Err(CumulantError::InvalidArgument(format!(
            "partition ground-set size must be in 1..={MAX_PARTITION_N}, got {n}"
        )));
    }
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(n);
    recurse(0, n, &mut blocks, &mut visit);
    Ok(())
}

fn recurse<F: FnMut(&[Vec<usize>])>(
    element: usize,
    n: usize,
    blocks: &mut Vec<Vec<usize>>,
    visit: &mut F,
) {
    if element == n {
        visit(blocks);
        return;
    }
    // Restricted-growth order: element joins existing blocks 0..k in order,
    // then opens a new block. Blocks stay canonical because each block is
    // created at its least element and grows in ascending order.
    for bi in 0..blocks.len() {
        blocks[bi].push(element);
        recurse(element + 1, n, blocks, visit);
        blocks[bi].pop();
    }
    blocks.push(vec![element]);
    recurse(element + 1, n, blocks, visit);
    blocks.pop();
}

/// Every set partition of `{0, …, n−1}`, exactly once, in lexicographic
/// restricted-growth-string order. The length of the result is the n-th Bell
/// number; see [`MAX_PARTITION_N`] for the memory caveat near the cap.
pub fn partitions_of(n: usize) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    visit_partitions(n, |blocks| {
        out.push(Partition {
            blocks: blocks.to_vec(),
            n,
        });
    })?;
    Ok(out)
}

/// The Möbius weight `(−1)^{|P|−1} (|P|−1)!` carried by a partition `P` in
/// the moment-to-cumulant inversion (the Möbius function of the partition
/// lattice evaluated from `P` up to the one-block partition).
pub fn mobius_to_top(p: &Partition) -> i64 {
    mobius_weight(p.num_blocks())
}

/// `(−1)^{k−1} (k−1)!` as a function of the block count `k ≥ 1`.
pub(crate) fn mobius_weight(k: usize) -> i64 {
    debug_assert!(k >= 1 && k <= MAX_PARTITION_N + 1);
    let mut fact: i64 = 1;
    for j in 1..k {
        fact *= j as i64;
    }
    if k % 2 == 1 {
        fact
    } else {
        -fact
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_block_and_singletons_are_extremes() {
        let parts = partitions_of(3).unwrap();
        assert_eq!(parts.first().unwrap(), &Partition::one_block(3));
        assert_eq!(parts.last().unwrap(), &Partition::singletons(3));
    }

    #[test]
    fn refinement_is_reflexive_and_respects_block_merging() {
        let p = Partition::new(vec![vec![0], vec![1], vec![2]], 3).unwrap();
        let q = Partition::new(vec![vec![0, 1], vec![2]], 3).unwrap();
        assert!(p.refines(&q));
        assert!(!q.refines(&p));
        assert!(q.refines(&q));
    }

    #[test]
    fn new_rejects_bad_blocks() {
        assert!(Partition::new(vec![vec![0], vec![0]], 1).is_err());
        assert!(Partition::new(vec![vec![0]], 2).is_err());
        assert!(Partition::new(vec![vec![0], vec![]], 1).is_err());
        assert!(Partition::new(vec![vec![0, 2]], 2).is_err());
    }

    #[test]
    fn mobius_weight_small_values() {
        assert_eq!(mobius_weight(1), 1);
        assert_eq!(mobius_weight(2), -1);
        assert_eq!(mobius_weight(3), 2);
        assert_eq!(mobius_weight(4), -6);
        assert_eq!(mobius_weight(5), 24);
    }
}
