//! Community detection by greedy minimization of the edge-density Potts
//! objective Q = −Σ (A_{mℓ} − p) δ(σ_m, σ_ℓ), permutation synthesis, and the
//! blocking-quality score.

use std::collections::HashMap;

use crate::error::{KuramotoError, Result};
use crate::generators::SplitMix64;
use crate::graph::{CouplingGraph, RowIndices};
use crate::model::{NaturalFrequencies, PhaseState};
use crate::partition::BlockPartition;
use crate::scalar::Real;

/// Outcome of [`detect_communities`].
#[derive(Debug, Clone)]
pub struct DetectionResult {
    pub partition: BlockPartition,
    /// Final objective, `modularity_objective(graph, labels, density)`.
    pub objective: f64,
    /// Total local-move passes over all aggregation levels.
    pub passes: usize,
    /// Seed that drove the node visit order.
    pub seed: u64,
    /// Edge density used as the null-model parameter p (clamped away from
    /// 0 and 1 so that degenerate graphs still resolve).
    pub density: f64,
}

/// Ratio of existing to potential edges, ordered pairs with the diagonal
/// included: (#ones)/M².
pub fn mean_edge_density(graph: &CouplingGraph) -> f64 {
    let m = graph.size() as f64;
    graph.total_ones() as f64 / (m * m)
}

/// The objective Q = −Σ (A_{mℓ} − p) δ(σ_m, σ_ℓ), summed over all ordered
/// pairs including the diagonal. Lower is better.
pub fn modularity_objective(graph: &CouplingGraph, labels: &[usize], p: f64) -> Result<f64> {
    if labels.len() != graph.size() {
        return Err(KuramotoError::LengthMismatch {
            expected: graph.size(),
            got: labels.len(),
        });
    }
    let mut ones_same = 0u64;
    for m in 0..graph.size() {
        for l in graph.row_nonzeros(m) {
            if labels[l] == labels[m] {
                ones_same += 1;
            }
        }
    }
    let mut counts: HashMap<usize, u64> = HashMap::new();
    for &label in labels {
        *counts.entry(label).or_insert(0) += 1;
    }
    let pairs_same: f64 = counts.values().map(|&n| (n as f64) * (n as f64)).sum();
    Ok(-(ones_same as f64 - p * pairs_same))
}

/// One aggregation level: symmetric weighted adjacency (self-loops dropped,
/// they cancel in move gains) and the number of original nodes per super-node.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    node_size: Vec<f64>,
}

impl Level {
    fn len(&self) -> usize {
        self.adj.len()
    }
}

/// Builds the symmetrized view (edge present when either direction carries a
/// one) and its edge density, ordered pairs with the diagonal included.
fn symmetrized_level(graph: &CouplingGraph) -> (Level, f64) {
    let m = graph.size();
    // Transposed nonzero lists so asymmetric inputs contribute both ways.
    let mut transpose: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut diag_ones = 0usize;
    for r in 0..m {
        for c in graph.row_nonzeros(r) {
            if c != r {
                transpose[c].push(r);
            } else {
                diag_ones += 1;
            }
        }
    }
    let mut union_ones = diag_ones;
    let mut adj = Vec::with_capacity(m);
    for r in 0..m {
        let mut neighbors: Vec<usize> = graph.row_nonzeros(r).filter(|&c| c != r).collect();
        neighbors.extend_from_slice(&transpose[r]);
        neighbors.sort_unstable();
        neighbors.dedup();
        union_ones += neighbors.len();
        adj.push(neighbors.into_iter().map(|c| (c, 1.0)).collect());
    }
    let density = union_ones as f64 / (m as f64 * m as f64);
    (
        Level {
            adj,
            node_size: vec![1.0; m],
        },
        density,
    )
}

/// Greedy local-move minimization of Q with p equal to the mean edge
/// density of the graph the moves operate on: starting from singletons,
/// nodes are visited in seeded random order and moved to the neighboring
/// community with the strictly largest Q decrease; once a pass makes no
/// move, communities are aggregated into super-nodes and the procedure
/// repeats, until aggregation stops merging or `max_passes` passes have
/// been spent.
///
/// Asymmetric inputs are symmetrized for the move phase only (an edge is
/// present when either direction carries a one; dynamics always use the
/// original matrix); the reported objective is evaluated on the original
/// graph with the density recorded in the result. The outcome is
/// deterministic in (graph, seed).
pub fn detect_communities(graph: &CouplingGraph, seed: u64, max_passes: usize) -> DetectionResult {
    let m = graph.size();
    let mut rng = SplitMix64::new(seed);
    let (first_level, raw_density) = symmetrized_level(graph);
    // The moves operate on the symmetrized view, so p is that view's edge
    // density (identical to the input's for symmetric graphs). Keep p
    // strictly inside (0, 1): at p = 1 no merge would ever gain, at p = 0
    // every merge would be free; half a coefficient's density is below any
    // achievable difference.
    let eps = 0.5 / (m as f64 * m as f64);
    let density = raw_density.max(eps).min(1.0 - eps);
    let mut level = first_level;
    // assignment[i] = super-node of original node i at the current level
    let mut assignment: Vec<usize> = (0..m).collect();
    let mut passes = 0usize;

    loop {
        let n = level.len();
        let mut labels: Vec<usize> = (0..n).collect();
        let mut size_sum = level.node_size.clone();

        while passes < max_passes {
            passes += 1;
            if !local_move_pass(&level, &mut labels, &mut size_sum, density, &mut rng) {
                break;
            }
        }

        // Compact community ids in order of first appearance.
        let mut compact: HashMap<usize, usize> = HashMap::new();
        let mut next_id = 0usize;
        let compacted: Vec<usize> = labels
            .iter()
            .map(|&c| {
                *compact.entry(c).or_insert_with(|| {
                    let id = next_id;
                    next_id += 1;
                    id
                })
            })
            .collect();
        for a in assignment.iter_mut() {
            *a = compacted[*a];
        }
        if next_id == n || passes >= max_passes {
            break;
        }
        level = aggregate(&level, &compacted, next_id);
    }

    // Group original nodes; order communities by decreasing size, ties by
    // smallest member, members ascending.
    let num = assignment.iter().copied().max().map_or(1, |x| x + 1);
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); num];
    for (i, &c) in assignment.iter().enumerate() {
        groups[c].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    let partition =
        BlockPartition::from_communities(m, groups).expect("grouped labels form a partition");
    let objective = modularity_objective(graph, &partition.labels(), density)
        .expect("labels have the graph's length");

    DetectionResult {
        partition,
        objective,
        passes,
        seed,
        density,
    }
}

fn local_move_pass(
    level: &Level,
    labels: &mut [usize],
    size_sum: &mut [f64],
    p: f64,
    rng: &mut SplitMix64,
) -> bool {
    let n = level.len();
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);

    let mut weight_to = vec![0.0f64; n];
    let mut stamp = vec![usize::MAX; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;

    for (visit, &v) in order.iter().enumerate() {
        touched.clear();
        for &(u, w) in &level.adj[v] {
            let c = labels[u];
            if stamp[c] != visit {
                stamp[c] = visit;
                weight_to[c] = 0.0;
                touched.push(c);
            }
            weight_to[c] += w;
        }
        let a = labels[v];
        let k_rest = if stamp[a] == visit { weight_to[a] } else { 0.0 };
        let s_v = level.node_size[v];
        let sum_rest = size_sum[a] - s_v;

        touched.sort_unstable();
        let mut best_c = a;
        let mut best_gain = 0.0f64;
        for &c in &touched {
            if c == a {
                continue;
            }
            // Gain in −Q from moving v into c (strictly positive required).
            let gain = 2.0 * (weight_to[c] - k_rest) - 2.0 * p * s_v * (size_sum[c] - sum_rest);
            if gain > best_gain {
                best_gain = gain;
                best_c = c;
            }
        }
        if best_c != a {
            labels[v] = best_c;
            size_sum[a] -= s_v;
            size_sum[best_c] += s_v;
            moved_any = true;
        }
    }
    moved_any
}

fn aggregate(level: &Level, compacted: &[usize], num: usize) -> Level {
    let mut maps: Vec<HashMap<usize, f64>> = vec![HashMap::new(); num];
    let mut node_size = vec![0.0f64; num];
    for v in 0..level.len() {
        let cv = compacted[v];
        node_size[cv] += level.node_size[v];
        for &(u, w) in &level.adj[v] {
            let cu = compacted[u];
            if cu != cv {
                *maps[cv].entry(cu).or_insert(0.0) += w;
            }
        }
    }
    let adj = maps
        .into_iter()
        .map(|m| {
            let mut list: Vec<(usize, f64)> = m.into_iter().collect();
            list.sort_unstable_by_key(|&(u, _)| u);
            list
        })
        .collect();
    Level { adj, node_size }
}

/// Relabels the graph so community members are contiguous: Ã = P A Pᵀ.
pub fn permute_graph(graph: &CouplingGraph, partition: &BlockPartition) -> Result<CouplingGraph> {
    if partition.size() != graph.size() {
        return Err(KuramotoError::InvalidPartition(format!(
            "partition covers {} indices, graph has {}",
            partition.size(),
            graph.size()
        )));
    }
    let inverse = partition.inverse();
    let rows = partition
        .permutation()
        .iter()
        .map(|&old| {
            let map = |list: &[usize]| {
                let mut mapped: Vec<usize> = list.iter().map(|&c| inverse[c]).collect();
                mapped.sort_unstable();
                mapped
            };
            match graph.row(old) {
                RowIndices::Nonzero(list) => RowIndices::Nonzero(map(list)),
                RowIndices::Zero(list) => RowIndices::Zero(map(list)),
            }
        })
        .collect();
    CouplingGraph::from_parts(graph.size(), rows)
}

/// Reorders a state into the partition's contiguous layout.
pub fn permute_state<T: Real>(
    state: &PhaseState<T>,
    partition: &BlockPartition,
) -> Result<PhaseState<T>> {
    PhaseState::new(partition.apply_to_slice(state.phases())?, state.time())
}

/// Undoes [`permute_state`], restoring the original node order.
pub fn unpermute_state<T: Real>(
    state: &PhaseState<T>,
    partition: &BlockPartition,
) -> Result<PhaseState<T>> {
    PhaseState::new(partition.unapply_to_slice(state.phases())?, state.time())
}

/// Reorders frequencies into the partition's contiguous layout.
pub fn permute_frequencies<T: Real>(
    freq: &NaturalFrequencies<T>,
    partition: &BlockPartition,
) -> Result<NaturalFrequencies<T>> {
    NaturalFrequencies::new(partition.apply_to_slice(freq.as_slice())?)
}

/// Block-diagonal indicator of a partition in contiguous ordering:
/// B̃_{mℓ} = 1 iff m and ℓ fall in the same community.
pub fn block_indicator(partition: &BlockPartition, m: usize) -> Result<CouplingGraph> {
    if partition.size() != m {
        return Err(KuramotoError::LengthMismatch {
            expected: m,
            got: partition.size(),
        });
    }
    let mut rows = Vec::with_capacity(m);
    let mut start = 0;
    for s in partition.community_sizes() {
        for _ in 0..s {
            rows.push((start..start + s).collect::<Vec<usize>>());
        }
        start += s;
    }
    CouplingGraph::from_nonzero_rows(m, rows)
}

/// Number of coefficients on which two 0/1 matrices differ.
fn hamming(a: &CouplingGraph, b: &CouplingGraph) -> usize {
    let mut count = 0;
    for m in 0..a.size() {
        let mut ita = a.row_nonzeros(m).peekable();
        let mut itb = b.row_nonzeros(m).peekable();
        loop {
            match (ita.peek(), itb.peek()) {
                (Some(&x), Some(&y)) => {
                    if x == y {
                        ita.next();
                        itb.next();
                    } else if x < y {
                        count += 1;
                        ita.next();
                    } else {
                        count += 1;
                        itb.next();
                    }
                }
                (Some(_), None) => {
                    count += 1;
                    ita.next();
                }
                (None, Some(_)) => {
                    count += 1;
                    itb.next();
                }
                (None, None) => break,
            }
        }
    }
    count
}

/// Blocking-quality score Σ|C̃| − Σ|C| with C = A − B and C̃ = Ã − B̃:
/// nonpositive means the detected blocking explains at least as many
/// coefficients as the planted one.
pub fn detection_score(
    a: &CouplingGraph,
    b_planted: &CouplingGraph,
    a_detected: &CouplingGraph,
    b_detected: &CouplingGraph,
) -> Result<i64> {
    let m = a.size();
    for g in [b_planted, a_detected, b_detected] {
        if g.size() != m {
            return Err(KuramotoError::LengthMismatch {
                expected: m,
                got: g.size(),
            });
        }
    }
    Ok(hamming(a_detected, b_detected) as i64 - hamming(a, b_planted) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{planted_block_matrix, SplitMix64};

    fn scrambled(graph: &CouplingGraph, seed: u64) -> (CouplingGraph, BlockPartition) {
        let mut order: Vec<usize> = (0..graph.size()).collect();
        SplitMix64::new(seed).shuffle(&mut order);
        let p = BlockPartition::from_order(order).unwrap();
        (permute_graph(graph, &p).unwrap(), p)
    }

    #[test]
    fn density_of_reference_graphs() {
        assert_eq!(mean_edge_density(&CouplingGraph::complete(7)), 1.0);
        assert_eq!(mean_edge_density(&CouplingGraph::empty(7)), 0.0);
        let (a, _, _) = planted_block_matrix(10, 0.0, 1, false).unwrap();
        assert_eq!(mean_edge_density(&a), 0.30);
    }

    #[test]
    fn objective_closed_forms() {
        let (a, _, truth) = planted_block_matrix(2, 0.0, 1, false).unwrap();
        let m = a.size();
        let ones = a.total_ones() as f64;
        let p = 0.3;

        let single = modularity_objective(&a, &vec![0; m], p).unwrap();
        assert!((single - -(ones - p * (m * m) as f64)).abs() < 1e-9);

        let singletons: Vec<usize> = (0..m).collect();
        let q = modularity_objective(&a, &singletons, p).unwrap();
        // Diagonal of the planted matrix is all ones.
        assert!((q - -(m as f64 - p * m as f64)).abs() < 1e-9);

        let q_truth = modularity_objective(&a, &truth.labels(), p).unwrap();
        assert!(q_truth < single);
    }

    #[test]
    fn clean_planted_blocks_are_recovered() {
        let (a, _, _) = planted_block_matrix(10, 0.0, 5, false).unwrap();
        let (shuffled, _) = scrambled(&a, 99);
        for seed in [1u64, 2, 3] {
            let result = detect_communities(&shuffled, seed, 64);
            assert_eq!(result.partition.community_sizes(), vec![40, 30, 20, 10]);
            let check = modularity_objective(
                &shuffled,
                &result.partition.labels(),
                result.density,
            )
            .unwrap();
            assert!((check - result.objective).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_graph_stays_singletons_for_any_seed() {
        let g = CouplingGraph::empty(17);
        let first = detect_communities(&g, 0, 32);
        assert_eq!(first.partition.num_communities(), 17);
        for seed in 1..5u64 {
            let r = detect_communities(&g, seed, 32);
            assert_eq!(r.partition, first.partition);
        }
    }

    #[test]
    fn complete_graph_collapses_to_one_community() {
        let g = CouplingGraph::complete(23);
        let r = detect_communities(&g, 7, 64);
        assert_eq!(r.partition.num_communities(), 1);
    }

    #[test]
    fn detection_is_deterministic_in_seed() {
        let (a, _, _) = planted_block_matrix(6, 0.15, 3, false).unwrap();
        let x = detect_communities(&a, 42, 64);
        let y = detect_communities(&a, 42, 64);
        assert_eq!(x.partition, y.partition);
        assert_eq!(x.objective, y.objective);
        assert_eq!(x.passes, y.passes);
    }

    #[test]
    fn objective_beats_singletons_after_detection() {
        let (a, _, _) = planted_block_matrix(8, 0.2, 11, false).unwrap();
        let r = detect_communities(&a, 5, 64);
        let singles: Vec<usize> = (0..a.size()).collect();
        let q0 = modularity_objective(&a, &singles, r.density).unwrap();
        assert!(r.objective <= q0);
    }

    #[test]
    fn permute_identity_is_identity() {
        let (a, _, _) = planted_block_matrix(3, 0.1, 2, false).unwrap();
        let id = BlockPartition::single(a.size()).unwrap();
        assert_eq!(permute_graph(&a, &id).unwrap(), a);
    }

    #[test]
    fn permute_then_inverse_recovers_graph() {
        let (a, _, _) = planted_block_matrix(3, 0.25, 8, false).unwrap();
        let (shuffled, p) = scrambled(&a, 4);
        let inverse_order = p.inverse().to_vec();
        let p_inv = BlockPartition::from_order(inverse_order).unwrap();
        let back = permute_graph(&shuffled, &p_inv).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn block_indicator_patterns() {
        let singles = BlockPartition::singletons(3).unwrap();
        let eye = block_indicator(&singles, 3).unwrap();
        assert_eq!(eye.total_ones(), 3);
        assert!(eye.contains(2, 2) && !eye.contains(0, 1));

        let one = BlockPartition::single(4).unwrap();
        assert_eq!(block_indicator(&one, 4).unwrap(), CouplingGraph::complete(4));

        let two = BlockPartition::contiguous(&[2, 1]).unwrap();
        let b = block_indicator(&two, 3).unwrap();
        let expect = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)];
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(b.contains(r, c), expect.contains(&(r, c)));
            }
        }
    }

    #[test]
    fn perfect_recovery_scores_zero() {
        let (a, b, _) = planted_block_matrix(10, 0.0, 13, false).unwrap();
        let (shuffled, _) = scrambled(&a, 21);
        let det = detect_communities(&shuffled, 1, 64);
        let a_detected = permute_graph(&shuffled, &det.partition).unwrap();
        let b_detected = block_indicator(&det.partition, a.size()).unwrap();
        let score = detection_score(&a, &b, &a_detected, &b_detected).unwrap();
        assert_eq!(score, 0);
    }

    #[test]
    fn single_community_blocking_scores_all_zeros() {
        let (a, b, _) = planted_block_matrix(10, 0.0, 17, false).unwrap();
        let single = BlockPartition::single(a.size()).unwrap();
        let a_detected = permute_graph(&a, &single).unwrap();
        let b_detected = block_indicator(&single, a.size()).unwrap();
        let score = detection_score(&a, &b, &a_detected, &b_detected).unwrap();
        assert_eq!(score, 10000 - 3000);
    }

    #[test]
    fn noisy_planted_blocks_score_nonpositive() {
        let (a, b, _) = planted_block_matrix(10, 0.2, 31, false).unwrap();
        let (shuffled, _) = scrambled(&a, 32);
        let det = detect_communities(&shuffled, 2, 64);
        let a_detected = permute_graph(&shuffled, &det.partition).unwrap();
        let b_detected = block_indicator(&det.partition, a.size()).unwrap();
        let score = detection_score(&a, &b, &a_detected, &b_detected).unwrap();
        assert!(score <= 0, "score {score}");
    }
}
