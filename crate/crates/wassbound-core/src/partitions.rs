//! Set partitions of small indexed tables, indecomposability, and filtered
//! enumeration.
//!
//! Joint cumulants of products reduce to sums over the *indecomposable*
//! partitions of a table of indices (Brillinger, Time Series: Data Analysis
//! and Theory, Theorem 2.3.2): a partition is indecomposable when the rows of
//! the table cannot be split into two nonempty groups such that every block
//! stays inside one group.  The fourth-order Stein term of the bound sums
//! products of cumulants over exactly these partitions of a 4x2 table, so the
//! enumeration here is the combinatorial engine behind every cumulant
//! expansion in the crate.
//!
//! Enumeration is in restricted-growth-string order, which is deterministic
//! and cheap to test; filtered lists are cached per (table shape, filter) so
//! the bound evaluation never re-enumerates.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use once_cell::race::OnceBox;

use crate::error::Error;
use crate::Result;

/// Hard cap on the number of cells enumerated exhaustively.
///
/// Bell(12) is about 4.2 million, the practical ceiling for exhaustive
/// enumeration; everything in this crate needs at most 8 cells.
pub const MAX_CELLS: usize = 12;

/// A rows x cols grid of `(row, col)` index pairs, the object whose set
/// partitions feed cumulant-of-product expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexedTable {
    rows: u8,
    cols: u8,
}

impl IndexedTable {
    /// Creates a table; `rows * cols` must be in `1..=12`.
    pub fn new(rows: u8, cols: u8) -> Result<Self> {
        let cells = rows as usize * cols as usize;
        if rows == 0 || cols == 0 || cells > MAX_CELLS {
            return Err(Error::argument("table must have 1..=12 cells"));
        }
        Ok(IndexedTable { rows, cols })
    }

    /// Number of rows.
    pub fn rows(&self) -> u8 {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> u8 {
        self.cols
    }

    /// Total number of cells.
    pub fn cell_count(&self) -> usize {
        self.rows as usize * self.cols as usize
    }

    /// Row of a linear (row-major) cell index.
    pub fn row_of(&self, cell: u8) -> u8 {
        cell / self.cols
    }

    /// The `(row, col)` pair of a linear cell index.
    pub fn cell(&self, cell: u8) -> (u8, u8) {
        (cell / self.cols, cell % self.cols)
    }

    /// All cells as `(row, col)` pairs in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        (0..self.cell_count() as u8).map(|c| self.cell(c))
    }
}

/// A set partition of the cells `0..n` of a table, stored as blocks of
/// linear cell indices.
///
/// Canonical form: elements ascending within each block, blocks ordered by
/// their smallest element.  The enumeration below produces this form
/// directly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<u8>>,
}

impl Partition {
    /// Builds a partition from blocks, normalizing to canonical form.
    pub fn new(mut blocks: Vec<Vec<u8>>) -> Result<Self> {
        if blocks.iter().any(|b| b.is_empty()) {
            return Err(Error::argument("partition blocks must be nonempty"));
        }
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        let p = Partition { blocks };
        let mut seen = [false; MAX_CELLS];
        for &c in p.blocks.iter().flatten() {
            let c = c as usize;
            if c >= MAX_CELLS || seen[c] {
                return Err(Error::argument("partition blocks must be disjoint cells in 0..12"));
            }
            seen[c] = true;
        }
        Ok(p)
    }

    /// The blocks of the partition.
    pub fn blocks(&self) -> &[Vec<u8>] {
        &self.blocks
    }

    /// Number of cells covered.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// True when the partition covers no cells (never produced here).
    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// True when the partition covers exactly the cells `0..n`.
    fn covers(&self, n: usize) -> bool {
        if self.len() != n {
            return false;
        }
        let mut seen = [false; MAX_CELLS];
        for &c in self.blocks.iter().flatten() {
            if c as usize >= n || seen[c as usize] {
                return false;
            }
            seen[c as usize] = true;
        }
        true
    }
}

/// Block-size constraints applied on top of indecomposability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartitionFilter {
    /// Smallest admissible block size.
    pub min_block_size: usize,
    /// Keep only partitions whose blocks all have even size (odd-order
    /// cumulants vanish for symmetric innovations).
    pub even_blocks_only: bool,
    /// Keep only perfect matchings (all blocks of size exactly 2); the only
    /// partitions surviving Gaussian cumulant structure.
    pub pairs_only: bool,
}

impl Default for PartitionFilter {
    fn default() -> Self {
        PartitionFilter {
            min_block_size: 1,
            even_blocks_only: false,
            pairs_only: false,
        }
    }
}

impl PartitionFilter {
    /// Minimum block size only.
    pub fn min_block(size: usize) -> Self {
        PartitionFilter {
            min_block_size: size,
            ..Default::default()
        }
    }

    /// Minimum block size 2 and even block sizes.
    pub fn even_min2() -> Self {
        PartitionFilter {
            min_block_size: 2,
            even_blocks_only: true,
            pairs_only: false,
        }
    }

    /// Perfect matchings only.
    pub fn pairs() -> Self {
        PartitionFilter {
            min_block_size: 2,
            even_blocks_only: false,
            pairs_only: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.pairs_only && self.min_block_size > 2 {
            return Err(Error::argument("pairs_only requires min_block_size <= 2"));
        }
        Ok(())
    }

    fn matches(&self, p: &Partition) -> bool {
        p.blocks.iter().all(|b| {
            b.len() >= self.min_block_size
                && (!self.even_blocks_only || b.len() % 2 == 0)
                && (!self.pairs_only || b.len() == 2)
        })
    }
}

/// Enumerates every set partition of `{0, .., set_size-1}` exactly once, in
/// restricted-growth-string order.
///
/// The count equals the Bell number of `set_size`; re-running yields
/// byte-identical output.
pub fn enumerate_partitions(set_size: usize) -> Result<Vec<Partition>> {
    if set_size == 0 || set_size > MAX_CELLS {
        return Err(Error::argument("set_size must be in 1..=12"));
    }
    let n = set_size;
    let mut rgs = vec![0u8; n];
    let mut prefix_max = vec![0u8; n];
    let mut out = Vec::new();
    loop {
        let nblocks = rgs.iter().copied().max().unwrap() as usize + 1;
        let mut blocks = vec![Vec::new(); nblocks];
        for (cell, &b) in rgs.iter().enumerate() {
            blocks[b as usize].push(cell as u8);
        }
        out.push(Partition { blocks });

        // advance to the next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return Ok(out);
            }
            i -= 1;
            if rgs[i] <= prefix_max[i - 1] {
                break;
            }
        }
        rgs[i] += 1;
        prefix_max[i] = prefix_max[i - 1].max(rgs[i]);
        for j in i + 1..n {
            rgs[j] = 0;
            prefix_max[j] = prefix_max[j - 1];
        }
    }
}

/// Tests whether `p` is indecomposable with respect to the rows of `table`:
/// no proper nonempty subset of rows has its cells formed by whole blocks.
///
/// Equivalently, the graph on rows in which two rows are adjacent when some
/// block contains cells of both is connected; implemented with union-find
/// over rows.
pub fn is_indecomposable(p: &Partition, table: &IndexedTable) -> Result<bool> {
    if !p.covers(table.cell_count()) {
        return Err(Error::argument("partition does not cover the table cells"));
    }
    let rows = table.rows as usize;
    let mut parent: [u8; MAX_CELLS] = [0; MAX_CELLS];
    for (i, slot) in parent.iter_mut().enumerate().take(rows) {
        *slot = i as u8;
    }
    fn find(parent: &mut [u8; MAX_CELLS], mut x: u8) -> u8 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for block in &p.blocks {
        let r0 = table.row_of(block[0]);
        for &c in &block[1..] {
            let (a, b) = (find(&mut parent, r0), find(&mut parent, table.row_of(c)));
            if a != b {
                parent[a as usize] = b;
            }
        }
    }
    let root = find(&mut parent, 0);
    for r in 1..rows as u8 {
        if find(&mut parent, r) != root {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Filters `ps` down to the indecomposable partitions satisfying `f`,
/// preserving input order.
pub fn filter_partitions(
    ps: &[Partition],
    table: &IndexedTable,
    f: &PartitionFilter,
) -> Result<Vec<Partition>> {
    f.validate()?;
    let mut out = Vec::new();
    for p in ps {
        if is_indecomposable(p, table)? && f.matches(p) {
            out.push(p.clone());
        }
    }
    Ok(out)
}

// Cache of filtered lists keyed by (rows, cols, filter).  The key space is
// tiny (cells <= 12, min_block_size <= 12, two flags) so a flat slot array
// with race-once initialization gives lock-free concurrent reads after the
// first use.
const SHAPE_SLOTS: usize = MAX_CELLS * MAX_CELLS;
const FILTER_SLOTS: usize = (MAX_CELLS + 1) * 4;
const CACHE_SLOTS: usize = SHAPE_SLOTS * FILTER_SLOTS;

static CACHE: [OnceBox<Vec<Partition>>; CACHE_SLOTS] =
    [const { OnceBox::new() }; CACHE_SLOTS];

fn cache_index(table: &IndexedTable, f: &PartitionFilter) -> usize {
    let shape = (table.rows as usize - 1) * MAX_CELLS + (table.cols as usize - 1);
    let filt = f.min_block_size.min(MAX_CELLS) * 4
        + (f.even_blocks_only as usize) * 2
        + f.pairs_only as usize;
    shape * FILTER_SLOTS + filt
}

/// The canonical filtered list for `(table, f)`, computed once and shared.
///
/// Safe for concurrent use: initialization races are resolved by first
/// writer wins, and readers only ever see the fully built list.
pub fn cached_filtered(table: &IndexedTable, f: &PartitionFilter) -> Result<&'static [Partition]> {
    f.validate()?;
    let slot = &CACHE[cache_index(table, f)];
    if let Some(v) = slot.get() {
        return Ok(v);
    }
    let all = enumerate_partitions(table.cell_count())?;
    let filtered = filter_partitions(&all, table, f)?;
    let _ = slot.set(Box::new(filtered));
    Ok(slot.get().expect("cache slot just initialized"))
}

/// All partitions of `{0..q}` whose blocks all have even size, cached.
///
/// These drive the moment/cumulant expansions of symmetric innovations,
/// where odd-order cumulants vanish.  Indecomposability does not restrict a
/// one-row table, so this reuses the same cache.
pub fn even_set_partitions(q: usize) -> Result<&'static [Partition]> {
    let table = IndexedTable::new(1, q as u8)?;
    let f = PartitionFilter {
        min_block_size: 1,
        even_blocks_only: true,
        pairs_only: false,
    };
    cached_filtered(&table, &f)
}

/// Bell numbers for set sizes 0..=12 (test oracle).
pub const BELL: [u64; 13] = [
    1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597,
];

#[cfg(test)]
mod tests {
    use super::*;

    fn table_4x2() -> IndexedTable {
        IndexedTable::new(4, 2).unwrap()
    }

    #[test]
    fn partition_counts_match_bell_numbers() {
        for n in 1..=8 {
            assert_eq!(enumerate_partitions(n).unwrap().len() as u64, BELL[n], "Bell({n})");
        }
    }

    #[test]
    fn enumeration_rejects_out_of_range() {
        assert!(enumerate_partitions(0).is_err());
        assert!(enumerate_partitions(13).is_err());
        assert!(enumerate_partitions(12).is_ok());
    }

    #[test]
    fn single_element_set_has_one_partition() {
        let ps = enumerate_partitions(1).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].blocks(), &[vec![0u8]]);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = enumerate_partitions(6).unwrap();
        let b = enumerate_partitions(6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn row_aligned_blocks_decompose() {
        let t = IndexedTable::new(2, 2).unwrap();
        // cells: (0,0)=0 (0,1)=1 (1,0)=2 (1,1)=3
        let rows_apart = Partition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(!is_indecomposable(&rows_apart, &t).unwrap());
        let cross = Partition::new(vec![vec![0, 2], vec![1, 3]]).unwrap();
        assert!(is_indecomposable(&cross, &t).unwrap());
    }

    #[test]
    fn coverage_is_checked() {
        let t = IndexedTable::new(2, 2).unwrap();
        let short = Partition::new(vec![vec![0, 1]]).unwrap();
        assert!(is_indecomposable(&short, &t).is_err());
    }

    #[test]
    fn four_by_two_filter_counts() {
        let t = table_4x2();
        let all = enumerate_partitions(8).unwrap();
        assert_eq!(all.len(), 4140);
        let min2 = filter_partitions(&all, &t, &PartitionFilter::min_block(2)).unwrap();
        assert_eq!(min2.len(), 545);
        let even = filter_partitions(&all, &t, &PartitionFilter::even_min2()).unwrap();
        assert_eq!(even.len(), 249);
        let pairs = filter_partitions(&all, &t, &PartitionFilter::pairs()).unwrap();
        assert_eq!(pairs.len(), 48);
    }

    #[test]
    fn filters_nest() {
        let t = table_4x2();
        let all = enumerate_partitions(8).unwrap();
        let min2 = filter_partitions(&all, &t, &PartitionFilter::min_block(2)).unwrap();
        let even = filter_partitions(&all, &t, &PartitionFilter::even_min2()).unwrap();
        let pairs = filter_partitions(&all, &t, &PartitionFilter::pairs()).unwrap();
        for p in &even {
            assert!(min2.contains(p));
        }
        for p in &pairs {
            assert!(even.contains(p));
        }
    }

    #[test]
    fn cached_lists_are_shared_and_correct() {
        let t = table_4x2();
        let a = cached_filtered(&t, &PartitionFilter::even_min2()).unwrap();
        let b = cached_filtered(&t, &PartitionFilter::even_min2()).unwrap();
        assert_eq!(a.len(), 249);
        assert!(core::ptr::eq(a.as_ptr(), b.as_ptr()));
        assert_eq!(cached_filtered(&t, &PartitionFilter::pairs()).unwrap().len(), 48);
    }

    #[test]
    fn even_set_partition_counts() {
        // number of even-block partitions of {1..q}: q=2 -> 1, 4 -> 4, 6 -> 31, 8 -> 379
        assert_eq!(even_set_partitions(2).unwrap().len(), 1);
        assert_eq!(even_set_partitions(4).unwrap().len(), 4);
        assert_eq!(even_set_partitions(6).unwrap().len(), 31);
        assert_eq!(even_set_partitions(8).unwrap().len(), 379);
    }

    #[test]
    fn pairs_filter_validates() {
        let bad = PartitionFilter {
            min_block_size: 4,
            even_blocks_only: false,
            pairs_only: true,
        };
        let t = table_4x2();
        let all = enumerate_partitions(8).unwrap();
        assert!(filter_partitions(&all, &t, &bad).is_err());
    }

    #[test]
    fn indecomposability_invariant_under_row_permutation() {
        // permuting rows of the 4x2 table maps cell i to sigma(row)*2+col
        let t = table_4x2();
        let all = enumerate_partitions(8).unwrap();
        let perm = [2u8, 0, 3, 1]; // a row permutation
        for p in all.iter().step_by(17) {
            let mapped: Vec<Vec<u8>> = p
                .blocks()
                .iter()
                .map(|b| b.iter().map(|&c| perm[(c / 2) as usize] * 2 + c % 2).collect())
                .collect();
            let q = Partition::new(mapped).unwrap();
            assert_eq!(
                is_indecomposable(p, &t).unwrap(),
                is_indecomposable(&q, &t).unwrap()
            );
        }
    }
}
