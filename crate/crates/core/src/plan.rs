//! Per-block summation plans: choose, for every submatrix, between direct
//! summation over nonzeros and precomputed block sums with zero-term
//! subtraction.

use std::ops::Range;

use crate::error::{KuramotoError, Result};
use crate::graph::{CouplingGraph, RowIndices};
use crate::partition::BlockPartition;

/// Summation mode of one (row-block, column-block) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    /// Sum directly over the stored nonzero indices.
    NonzeroSum,
    /// Use the precomputed block sums and subtract the stored zero terms.
    PrecomputeSubtract,
}

#[derive(Debug, Clone)]
struct PlanPair {
    mode: SumMode,
    /// CSR-style offsets over the rows of the row block.
    offsets: Vec<usize>,
    /// Stored column indices (absolute), nonzeros or zeros per `mode`.
    indices: Vec<usize>,
    ones: usize,
    zeros: usize,
}

/// Partition-aligned tiling of the matrix with a summation mode and the
/// matching index lists per block pair.
///
/// A plan is tied to the graph it was built from (checked by size and total
/// one-count) and assumes states permuted consistently with the partition
/// ordering used to build it.
#[derive(Debug, Clone)]
pub struct BlockPlan {
    size: usize,
    blocks: Vec<Range<usize>>,
    pairs: Vec<PlanPair>,
    graph_ones: usize,
}

impl BlockPlan {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn mode(&self, row_block: usize, col_block: usize) -> SumMode {
        self.pairs[row_block * self.blocks.len() + col_block].mode
    }

    /// Ones/zeros tallies of a block pair.
    pub fn pair_counts(&self, row_block: usize, col_block: usize) -> (usize, usize) {
        let p = &self.pairs[row_block * self.blocks.len() + col_block];
        (p.ones, p.zeros)
    }

    /// Total stored indices over all pairs: Σ min(ones, zeros) per block.
    pub fn stored_index_count(&self) -> usize {
        self.pairs.iter().map(|p| p.indices.len()).sum()
    }

    fn pair(&self, row_block: usize, col_block: usize) -> &PlanPair {
        &self.pairs[row_block * self.blocks.len() + col_block]
    }

    /// Stored indices of one row within one column block.
    pub(crate) fn row_indices(&self, row_block: usize, col_block: usize, row: usize) -> &[usize] {
        let p = self.pair(row_block, col_block);
        let local = row - self.blocks[row_block].start;
        &p.indices[p.offsets[local]..p.offsets[local + 1]]
    }

    pub(crate) fn matches(&self, graph: &CouplingGraph) -> Result<()> {
        if self.size != graph.size() {
            return Err(KuramotoError::PlanMismatch(format!(
                "plan built for size {}, graph has size {}",
                self.size,
                graph.size()
            )));
        }
        if self.graph_ones != graph.total_ones() {
            return Err(KuramotoError::PlanMismatch(format!(
                "plan built for a graph with {} ones, this graph has {}",
                self.graph_ones,
                graph.total_ones()
            )));
        }
        Ok(())
    }

    /// Flop proxy of one evaluation with this plan, counting one unit per
    /// scalar trig evaluation, addition, or multiplication:
    /// 2M for the global sin/cos tables, 2·span per column block whose sums
    /// are precomputed, 2 units per stored index (sine and cosine channel),
    /// 2 units per row and precompute pair (seeding from the block sums),
    /// and 3 units per row for the final combination.
    pub fn flop_proxy(&self) -> u64 {
        let nb = self.blocks.len();
        let mut proxy = 2 * self.size as u64;
        for (j, col) in self.blocks.iter().enumerate() {
            let used = (0..nb).any(|i| self.mode(i, j) == SumMode::PrecomputeSubtract);
            if used {
                proxy += 2 * col.len() as u64;
            }
        }
        for (idx, p) in self.pairs.iter().enumerate() {
            proxy += 2 * p.indices.len() as u64;
            if p.mode == SumMode::PrecomputeSubtract {
                let rows = self.blocks[idx / nb].len() as u64;
                proxy += 2 * rows;
            }
        }
        proxy + 3 * self.size as u64
    }
}

/// Flop proxy of one naive graph evaluation: one sine plus one addition per
/// logical nonzero coefficient.
pub fn naive_flop_proxy(graph: &CouplingGraph) -> u64 {
    2 * graph.total_ones() as u64
}

/// Builds the block plan for a graph whose rows/columns are already ordered
/// by community (the partition must be contiguous). Each block pair gets
/// `PrecomputeSubtract` when its ones outnumber its zeros, `NonzeroSum`
/// otherwise (ties included), and stores the matching index list per row.
pub fn plan_blocks(graph: &CouplingGraph, partition: &BlockPartition) -> Result<BlockPlan> {
    if partition.size() != graph.size() {
        return Err(KuramotoError::InvalidPartition(format!(
            "partition covers {} indices, graph has {}",
            partition.size(),
            graph.size()
        )));
    }
    if !partition.is_identity() {
        return Err(KuramotoError::InvalidPartition(
            "plan_blocks needs the contiguous layout; permute the graph first".into(),
        ));
    }
    let blocks: Vec<Range<usize>> = {
        let mut start = 0;
        partition
            .community_sizes()
            .into_iter()
            .map(|s| {
                let r = start..start + s;
                start += s;
                r
            })
            .collect()
    };
    let nb = blocks.len();
    let mut pairs = Vec::with_capacity(nb * nb);
    for row_block in &blocks {
        for col_block in &blocks {
            pairs.push(build_pair(graph, row_block.clone(), col_block.clone()));
        }
    }
    Ok(BlockPlan {
        size: graph.size(),
        blocks,
        pairs,
        graph_ones: graph.total_ones(),
    })
}

fn build_pair(graph: &CouplingGraph, rows: Range<usize>, cols: Range<usize>) -> PlanPair {
    let span = cols.len();
    let mut ones = 0usize;
    for m in rows.clone() {
        ones += ones_in_range(graph, m, &cols);
    }
    let zeros = rows.len() * span - ones;
    let mode = if ones > zeros {
        SumMode::PrecomputeSubtract
    } else {
        SumMode::NonzeroSum
    };

    let mut offsets = Vec::with_capacity(rows.len() + 1);
    offsets.push(0);
    let mut indices = Vec::with_capacity(match mode {
        SumMode::NonzeroSum => ones,
        SumMode::PrecomputeSubtract => zeros,
    });
    for m in rows.clone() {
        match (mode, graph.row(m)) {
            (SumMode::NonzeroSum, RowIndices::Nonzero(list)) => {
                indices.extend_from_slice(range_slice(list, &cols));
            }
            (SumMode::NonzeroSum, RowIndices::Zero(list)) => {
                extend_complement(&mut indices, range_slice(list, &cols), &cols);
            }
            (SumMode::PrecomputeSubtract, RowIndices::Zero(list)) => {
                indices.extend_from_slice(range_slice(list, &cols));
            }
            (SumMode::PrecomputeSubtract, RowIndices::Nonzero(list)) => {
                extend_complement(&mut indices, range_slice(list, &cols), &cols);
            }
        }
        offsets.push(indices.len());
    }
    PlanPair {
        mode,
        offsets,
        indices,
        ones,
        zeros,
    }
}

fn ones_in_range(graph: &CouplingGraph, m: usize, cols: &Range<usize>) -> usize {
    match graph.row(m) {
        RowIndices::Nonzero(list) => range_slice(list, cols).len(),
        RowIndices::Zero(list) => cols.len() - range_slice(list, cols).len(),
    }
}

/// Subslice of a sorted index list falling inside the half-open range.
fn range_slice<'a>(sorted: &'a [usize], cols: &Range<usize>) -> &'a [usize] {
    let lo = sorted.partition_point(|&x| x < cols.start);
    let hi = sorted.partition_point(|&x| x < cols.end);
    &sorted[lo..hi]
}

/// Appends the indices of `cols` that are absent from the sorted `skip` list.
fn extend_complement(out: &mut Vec<usize>, skip: &[usize], cols: &Range<usize>) {
    let mut pos = 0;
    for c in cols.clone() {
        if pos < skip.len() && skip[pos] == c {
            pos += 1;
        } else {
            out.push(c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::random_threshold_matrix;

    #[test]
    fn fully_occupied_block_precomputes_with_empty_lists() {
        let g = CouplingGraph::complete(6);
        let plan = plan_blocks(&g, &BlockPartition::single(6).unwrap()).unwrap();
        assert_eq!(plan.mode(0, 0), SumMode::PrecomputeSubtract);
        assert_eq!(plan.stored_index_count(), 0);
        assert_eq!(plan.pair_counts(0, 0), (36, 0));
    }

    #[test]
    fn all_zero_block_sums_nonzeros_with_empty_lists() {
        let g = CouplingGraph::empty(6);
        let plan = plan_blocks(&g, &BlockPartition::single(6).unwrap()).unwrap();
        assert_eq!(plan.mode(0, 0), SumMode::NonzeroSum);
        assert_eq!(plan.stored_index_count(), 0);
    }

    #[test]
    fn exact_tie_breaks_toward_nonzero_sum() {
        // 2x2 with exactly half ones.
        let g = CouplingGraph::from_nonzero_rows(2, vec![vec![0], vec![1]]).unwrap();
        let plan = plan_blocks(&g, &BlockPartition::single(2).unwrap()).unwrap();
        assert_eq!(plan.pair_counts(0, 0), (2, 2));
        assert_eq!(plan.mode(0, 0), SumMode::NonzeroSum);
    }

    #[test]
    fn pair_tallies_tile_the_matrix() {
        let g = random_threshold_matrix(30, 0.6, 123).unwrap();
        let part = BlockPartition::contiguous(&[12, 9, 6, 3]).unwrap();
        let plan = plan_blocks(&g, &part).unwrap();
        let mut ones = 0;
        let mut zeros = 0;
        for i in 0..4 {
            for j in 0..4 {
                let (o, z) = plan.pair_counts(i, j);
                ones += o;
                zeros += z;
            }
        }
        assert_eq!(ones, g.total_ones());
        assert_eq!(ones + zeros, 30 * 30);
    }

    #[test]
    fn stored_rows_match_graph_membership() {
        let g = random_threshold_matrix(25, 0.35, 7).unwrap();
        let part = BlockPartition::contiguous(&[10, 15]).unwrap();
        let plan = plan_blocks(&g, &part).unwrap();
        for (i, rows) in plan.blocks().to_vec().iter().enumerate() {
            for (j, cols) in plan.blocks().to_vec().iter().enumerate() {
                for m in rows.clone() {
                    let stored = plan.row_indices(i, j, m);
                    assert!(stored.windows(2).all(|w| w[0] < w[1]));
                    for &c in stored {
                        assert!(cols.contains(&c));
                        match plan.mode(i, j) {
                            SumMode::NonzeroSum => assert!(g.contains(m, c)),
                            SumMode::PrecomputeSubtract => assert!(!g.contains(m, c)),
                        }
                    }
                    let expect = match plan.mode(i, j) {
                        SumMode::NonzeroSum => {
                            cols.clone().filter(|&c| g.contains(m, c)).count()
                        }
                        SumMode::PrecomputeSubtract => {
                            cols.clone().filter(|&c| !g.contains(m, c)).count()
                        }
                    };
                    assert_eq!(stored.len(), expect);
                }
            }
        }
    }

    #[test]
    fn plan_rejects_non_contiguous_partition() {
        let g = CouplingGraph::complete(4);
        let scrambled = BlockPartition::from_order(vec![2, 0, 3, 1]).unwrap();
        assert!(plan_blocks(&g, &scrambled).is_err());
    }
}
