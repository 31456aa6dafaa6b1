//! The alternating-sum function on finite sets, its two additivity laws, and
//! the block construction that realizes sums of block values as alternating
//! sums of single sets.
//!
//! For `B = {a_1 < .. < a_k}` the alternating sum assigns signs so the
//! largest element is positive: `f(B) = a_k - a_{k-1} + a_{k-2} - ..`. The
//! value always satisfies `1 <= f(B) <= max(B)`, so `f` maps nonempty subsets
//! of an interval back into the interval. Two exact laws drive everything
//! here:
//!
//! * merging: `f(A ∪ B) = f(A) + f(B)` when `A` and `B` have even order and
//!   every element of `A` is below every element of `B`;
//! * excision: `f(A - P) = f(A) + f(P)` when `P` is a consecutive run inside
//!   `A` of even order and the number of elements of `A` above `P` is odd.

use crate::set::FiniteSet;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AltSumError {
    #[error("alternating sum of the empty set is undefined")]
    EmptySet,
    #[error("{side} set has odd order")]
    OddOrder { side: &'static str },
    #[error("left set is not entirely below the right set")]
    NotBelow,
    #[error("excised set is not a subset")]
    NotSubset,
    #[error("excised set is not consecutive in its superset")]
    NotConsecutive,
    #[error("number of elements above the excised set is even")]
    EvenAboveCount,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("part size {0} is not a positive multiple of 4")]
    BadPartSize(u64),
    #[error("need at least 2 parts, got {0}")]
    TooFewParts(usize),
    #[error("part sizes must be nondecreasing")]
    PartsDecreasing,
    #[error("base sequence must be strictly increasing and positive")]
    BadBase,
    #[error("parts need {need} base elements, only {have} available")]
    BaseTooShort { need: u64, have: usize },
    #[error("index set must be nonempty")]
    EmptyIndexSet,
    #[error("block index {0} out of range")]
    IndexOutOfRange(usize),
}

/// Alternating sum with the largest element positive.
pub fn alt_sum(set: &FiniteSet) -> Result<u64, AltSumError> {
    if set.is_empty() {
        return Err(AltSumError::EmptySet);
    }
    // Evaluate from the top down; every partial value stays in [1, max].
    let mut acc = 0u64;
    for (i, e) in set.iter().rev().enumerate() {
        if i % 2 == 0 {
            acc += e;
        } else {
            acc -= e;
        }
    }
    debug_assert!(acc >= 1 && acc <= set.max_elem().unwrap());
    Ok(acc)
}

/// Union of two even-order sets with `a` entirely below `b`; under these
/// preconditions `alt_sum(a ∪ b) = alt_sum(a) + alt_sum(b)`.
pub fn merge_below(a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet, AltSumError> {
    if a.is_empty() || b.is_empty() {
        return Err(AltSumError::EmptySet);
    }
    if !a.len().is_multiple_of(2) {
        return Err(AltSumError::OddOrder { side: "left" });
    }
    if !b.len().is_multiple_of(2) {
        return Err(AltSumError::OddOrder { side: "right" });
    }
    if !a.is_below(b) {
        return Err(AltSumError::NotBelow);
    }
    let merged = a.union(b);
    debug_assert_eq!(
        alt_sum(&merged).unwrap(),
        alt_sum(a).unwrap() + alt_sum(b).unwrap()
    );
    Ok(merged)
}

/// Removes a consecutive even-order run `p` from `a` when the elements of `a`
/// above `p` are odd in number; then `alt_sum(a - p) = alt_sum(a) + alt_sum(p)`.
pub fn excise(a: &FiniteSet, p: &FiniteSet) -> Result<FiniteSet, AltSumError> {
    if a.is_empty() || p.is_empty() {
        return Err(AltSumError::EmptySet);
    }
    let Some(start) = p.min_elem().and_then(|m| a.position(m)) else {
        return Err(AltSumError::NotSubset);
    };
    if !p.is_subset_of(a) {
        return Err(AltSumError::NotSubset);
    }
    if a.elems()[start..start + p.len()] != *p.elems() {
        return Err(AltSumError::NotConsecutive);
    }
    if !p.len().is_multiple_of(2) {
        return Err(AltSumError::OddOrder { side: "excised" });
    }
    let above = a.len() - (start + p.len());
    if above.is_multiple_of(2) {
        return Err(AltSumError::EvenAboveCount);
    }
    let rest = a.difference(p);
    debug_assert_eq!(
        alt_sum(&rest).unwrap(),
        alt_sum(a).unwrap() + alt_sum(p).unwrap()
    );
    Ok(rest)
}

/// The block layout over a strictly increasing base sequence `b_1..b_L` with
/// part sizes `a_1 <= .. <= a_m` (each a positive multiple of 4):
///
/// * proper blocks `B_i` take consecutive runs of the base, block `i`
///   spanning base positions `s_{i-1}+1 ..= s_i` where `s_i = a_1+..+a_i`;
/// * `P_1` spans base positions `a_1/2 ..= a_1 - 1` (inside `B_1`) and `P_2`
///   spans `a_1 + 2 ..= 3*a_1/2 + 1` (inside `B_2`), both of order `a_1/2`;
/// * the merged block is `P_1 ∪ P_2`, of order `a_1`.
///
/// Blocks are indexed `1..=m` with the merged block as index `m + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSystem {
    base: Vec<u64>,
    part_sizes: Vec<u64>,
    prefix_sums: Vec<u64>,
    blocks: Vec<FiniteSet>,
    p1: FiniteSet,
    p2: FiniteSet,
    merged: FiniteSet,
}

impl BlockSystem {
    pub fn base(&self) -> &[u64] {
        &self.base
    }

    pub fn part_sizes(&self) -> &[u64] {
        &self.part_sizes
    }

    /// Prefix sums of the part sizes.
    pub fn prefix_sums(&self) -> &[u64] {
        &self.prefix_sums
    }

    /// Total number of blocks including the merged one.
    pub fn n_blocks(&self) -> usize {
        self.part_sizes.len() + 1
    }

    /// Block by 1-based index; the last index is the merged block.
    pub fn block(&self, i: usize) -> Option<&FiniteSet> {
        if i == 0 || i > self.n_blocks() {
            None
        } else if i == self.n_blocks() {
            Some(&self.merged)
        } else {
            Some(&self.blocks[i - 1])
        }
    }

    pub fn p1(&self) -> &FiniteSet {
        &self.p1
    }

    pub fn p2(&self) -> &FiniteSet {
        &self.p2
    }

    pub fn merged_block(&self) -> &FiniteSet {
        &self.merged
    }

    /// Alternating sums of blocks `1..=n_blocks`, in index order.
    pub fn block_values(&self) -> Vec<u64> {
        (1..=self.n_blocks())
            .map(|i| alt_sum(self.block(i).unwrap()).expect("blocks are nonempty"))
            .collect()
    }
}

/// Builds the block layout. Rejects part sizes that are not positive
/// multiples of 4, decreasing part sizes, fewer than two parts, and base
/// sequences too short for the parts.
pub fn build_blocks(base: &[u64], part_sizes: &[u64]) -> Result<BlockSystem, BlockError> {
    if part_sizes.len() < 2 {
        return Err(BlockError::TooFewParts(part_sizes.len()));
    }
    for &a in part_sizes {
        if a == 0 || a % 4 != 0 {
            return Err(BlockError::BadPartSize(a));
        }
    }
    if part_sizes.windows(2).any(|w| w[1] < w[0]) {
        return Err(BlockError::PartsDecreasing);
    }
    if base.first().is_some_and(|&e| e == 0) || base.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BlockError::BadBase);
    }
    let total: u64 = part_sizes.iter().sum();
    if total > base.len() as u64 {
        return Err(BlockError::BaseTooShort {
            need: total,
            have: base.len(),
        });
    }

    let mut prefix_sums = Vec::with_capacity(part_sizes.len());
    let mut acc = 0u64;
    for &a in part_sizes {
        acc += a;
        prefix_sums.push(acc);
    }

    let take = |lo: u64, hi: u64| -> FiniteSet {
        // 1-based inclusive base positions.
        FiniteSet::new(base[lo as usize - 1..hi as usize].to_vec()).expect("base is increasing")
    };

    let mut blocks = Vec::with_capacity(part_sizes.len());
    let mut lo = 1u64;
    for &hi in &prefix_sums {
        blocks.push(take(lo, hi));
        lo = hi + 1;
    }

    let a1 = part_sizes[0];
    let p1 = take(a1 / 2, a1 - 1);
    let p2 = take(a1 + 2, 3 * a1 / 2 + 1);
    let merged = p1.union(&p2);

    debug_assert_eq!(p1.len() as u64, a1 / 2);
    debug_assert_eq!(p2.len() as u64, a1 / 2);
    debug_assert!(p1.is_subset_of(&blocks[0]));
    debug_assert!(p2.is_subset_of(&blocks[1]));

    Ok(BlockSystem {
        base: base.to_vec(),
        part_sizes: part_sizes.to_vec(),
        prefix_sums,
        blocks,
        p1,
        p2,
        merged,
    })
}

/// How a selection of block indices combines into a single set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineCase {
    /// Merged block not selected: plain union of proper blocks.
    Blocks,
    /// Merged block selected, neither `B_1` nor `B_2`: the merged block joins
    /// the union disjointly.
    MergedDisjoint,
    /// Merged block and `B_1`: the pair contributes `(B_1 - P_1) ∪ P_2`.
    MergedWithFirst,
    /// Merged block and `B_2`: the pair contributes `P_1 ∪ (B_2 - P_2)`.
    MergedWithSecond,
    /// Merged block, `B_1` and `B_2`: the triple contributes
    /// `(B_1 ∪ B_2) - merged`.
    MergedWithBoth,
}

/// Case taken by [`combine`] for a selection over `n_blocks` indices.
pub fn combine_case(n_blocks: usize, indices: &BTreeSet<usize>) -> CombineCase {
    if !indices.contains(&n_blocks) {
        CombineCase::Blocks
    } else {
        match (indices.contains(&1), indices.contains(&2)) {
            (false, false) => CombineCase::MergedDisjoint,
            (true, false) => CombineCase::MergedWithFirst,
            (false, true) => CombineCase::MergedWithSecond,
            (true, true) => CombineCase::MergedWithBoth,
        }
    }
}

/// Combines the selected blocks into one set whose alternating sum equals the
/// sum of the selected block values, and whose order is a subset sum of the
/// part sizes.
pub fn combine(bs: &BlockSystem, indices: &BTreeSet<usize>) -> Result<FiniteSet, BlockError> {
    if indices.is_empty() {
        return Err(BlockError::EmptyIndexSet);
    }
    let n_blocks = bs.n_blocks();
    for &i in indices {
        if i == 0 || i > n_blocks {
            return Err(BlockError::IndexOutOfRange(i));
        }
    }
    let rest_union = |skip: &[usize]| -> FiniteSet {
        let mut acc = FiniteSet::empty();
        for &i in indices {
            if i == n_blocks || skip.contains(&i) {
                continue;
            }
            acc = acc.union(bs.block(i).unwrap());
        }
        acc
    };
    let b1 = bs.block(1).unwrap();
    let b2 = bs.block(2).unwrap();
    let set = match combine_case(n_blocks, indices) {
        CombineCase::Blocks => rest_union(&[]),
        CombineCase::MergedDisjoint => bs.merged_block().union(&rest_union(&[])),
        CombineCase::MergedWithFirst => {
            let pair = b1.difference(bs.p1()).union(bs.p2());
            pair.union(&rest_union(&[1]))
        }
        CombineCase::MergedWithSecond => {
            let pair = bs.p1().union(&b2.difference(bs.p2()));
            pair.union(&rest_union(&[2]))
        }
        CombineCase::MergedWithBoth => {
            let triple = b1.union(b2).difference(bs.merged_block());
            triple.union(&rest_union(&[1, 2]))
        }
    };
    Ok(set)
}
