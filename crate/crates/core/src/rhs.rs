//! Interchangeable right-hand-side evaluation strategies with exact
//! trig-evaluation accounting.
//!
//! The classical model offers the straightforward double loop and the
//! order-parameter reformulation built on precomputed sums. On graphs, the
//! same pair of ideas becomes the stored-index matrix-vector traversal and
//! the block-hybrid scheme, which chooses per block between summing nonzero
//! terms and subtracting zero terms from precomputed block sums.

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::counters::EvalCounters;
use crate::diagnostics;
use crate::error::{KuramotoError, Result};
use crate::graph::CouplingGraph;
use crate::model::{NaturalFrequencies, PhaseState, ScalingMode};
use crate::plan::{BlockPlan, SumMode};
use crate::scalar::{from_usize, Real};
use crate::trig;

/// Row count above which per-row output loops run on the rayon pool.
/// Rows are written disjointly and each row sums in a fixed order, so the
/// results are bit-identical to the sequential path.
const PAR_ROWS: usize = 512;

fn check_len<T: Real>(state: &PhaseState<T>, freq: &NaturalFrequencies<T>) -> Result<usize> {
    if state.len() != freq.len() {
        return Err(KuramotoError::LengthMismatch {
            expected: state.len(),
            got: freq.len(),
        });
    }
    Ok(state.len())
}

fn check_graph<T: Real>(state: &PhaseState<T>, graph: &CouplingGraph) -> Result<()> {
    if state.len() != graph.size() {
        return Err(KuramotoError::LengthMismatch {
            expected: state.len(),
            got: graph.size(),
        });
    }
    Ok(())
}

/// Coupling prefactor K/M_m of row m, or `None` for an uncoupled row
/// (degree zero under non-uniform scaling: the term is zero, no division).
#[inline]
fn row_factor<T: Real>(
    coupling: T,
    scaling: ScalingMode,
    graph: &CouplingGraph,
    m: usize,
) -> Option<T> {
    match scaling {
        ScalingMode::Uniform => Some(coupling / from_usize(graph.size())),
        ScalingMode::NonUniform => {
            let d = graph.degree(m);
            if d == 0 {
                None
            } else {
                Some(coupling / from_usize(d))
            }
        }
    }
}

fn fill_rows<T: Real, F: Fn(usize) -> T + Sync>(out: &mut [T], f: F) {
    if out.len() >= PAR_ROWS {
        out.par_iter_mut()
            .enumerate()
            .for_each(|(m, slot)| *slot = f(m));
    } else {
        for (m, slot) in out.iter_mut().enumerate() {
            *slot = f(m);
        }
    }
}

/// Classical all-to-all coupling by the straightforward double loop:
/// F_m = ω_m + (K/M) Σ_ℓ sin(θ_ℓ − θ_m), diagonal skipped.
/// Counts M(M−1) sine evaluations.
pub fn rhs_classical_naive<T: Real>(
    state: &PhaseState<T>,
    freq: &NaturalFrequencies<T>,
    coupling: T,
    counters: &EvalCounters,
) -> Result<Vec<T>> {
    let m = check_len(state, freq)?;
    let start = Instant::now();
    let theta = state.phases();
    let omega = freq.as_slice();
    let k_over_m = coupling / from_usize(m);
    let mut out = vec![T::zero(); m];
    fill_rows(&mut out, |i| {
        let mut acc = T::zero();
        for l in 0..m {
            if l != i {
                acc += (theta[l] - theta[i]).sin();
            }
        }
        omega[i] + k_over_m * acc
    });
    counters.add_sin((m * (m - 1)) as u64);
    counters.add_wall(start.elapsed());
    Ok(out)
}

/// Classical coupling through the order-parameter reformulation:
/// S_M and C_M are formed once, then F_m = ω_m + K (S_M cos θ_m − C_M sin θ_m).
/// Counts 2M sines + 2M cosines (the cost convention that charges the sums
/// and the combination separately); the tables actually built are 2M entries.
pub fn rhs_classical_order_param<T: Real>(
    state: &PhaseState<T>,
    freq: &NaturalFrequencies<T>,
    coupling: T,
    counters: &EvalCounters,
) -> Result<Vec<T>> {
    let m = check_len(state, freq)?;
    let start = Instant::now();
    let (sin, cos) = trig::tables(state.phases());
    let inv_m = T::one() / from_usize(m);
    let s_mean = sin.iter().copied().sum::<T>() * inv_m;
    let c_mean = cos.iter().copied().sum::<T>() * inv_m;
    let omega = freq.as_slice();
    let mut out = vec![T::zero(); m];
    fill_rows(&mut out, |i| {
        omega[i] + coupling * (s_mean * cos[i] - c_mean * sin[i])
    });
    counters.add_sin(2 * m as u64);
    counters.add_cos(2 * m as u64);
    counters.add_table(2 * m as u64);
    counters.add_wall(start.elapsed());
    Ok(out)
}

/// Graph coupling by direct summation over the logical nonzeros of each row:
/// G_m = ω_m + (K/M_m) Σ_ℓ A_{mℓ} sin(θ_ℓ − θ_m).
/// Counts one sine per nonzero coefficient.
pub fn rhs_graph_naive<T: Real>(
    state: &PhaseState<T>,
    freq: &NaturalFrequencies<T>,
    coupling: T,
    graph: &CouplingGraph,
    scaling: ScalingMode,
    counters: &EvalCounters,
) -> Result<Vec<T>> {
    let m = check_len(state, freq)?;
    check_graph(state, graph)?;
    let start = Instant::now();
    let theta = state.phases();
    let omega = freq.as_slice();
    let mut out = vec![T::zero(); m];
    fill_rows(&mut out, |i| {
        let Some(factor) = row_factor(coupling, scaling, graph, i) else {
            return omega[i];
        };
        let mut acc = T::zero();
        for l in graph.row_nonzeros(i) {
            acc += (theta[l] - theta[i]).sin();
        }
        omega[i] + factor * acc
    });
    counters.add_sin(graph.total_ones() as u64);
    counters.add_wall(start.elapsed());
    Ok(out)
}

/// Graph coupling via the componentwise-product form: sin(θ) and cos(θ) are
/// evaluated once, u = 𝒜 sin(θ) and v = 𝒜 cos(θ) come from stored-index row
/// traversal, and G = ω + K (u .* cos(θ) − v .* sin(θ)).
/// Counts exactly 2M trig evaluations.
pub fn rhs_graph_matvec<T: Real>(
    state: &PhaseState<T>,
    freq: &NaturalFrequencies<T>,
    coupling: T,
    graph: &CouplingGraph,
    scaling: ScalingMode,
    counters: &EvalCounters,
) -> Result<Vec<T>> {
    let m = check_len(state, freq)?;
    check_graph(state, graph)?;
    let start = Instant::now();
    let (sin, cos) = trig::tables(state.phases());
    let (row_sin, row_cos) = trig::adjacency_sums(graph, &sin, &cos);
    let omega = freq.as_slice();
    let mut out = vec![T::zero(); m];
    fill_rows(&mut out, |i| {
        let Some(factor) = row_factor(coupling, scaling, graph, i) else {
            return omega[i];
        };
        omega[i] + factor * (row_sin[i] * cos[i] - row_cos[i] * sin[i])
    });
    counters.add_sin(m as u64);
    counters.add_cos(m as u64);
    counters.add_table(2 * m as u64);
    counters.add_wall(start.elapsed());
    Ok(out)
}

/// Graph coupling with a per-block choice between direct nonzero summation
/// and precomputed block sums with zero-term subtraction. The global trig
/// tables are built once (2M evaluations) and shared across blocks; the plan
/// must have been built for this graph and the state must already be in the
/// plan's (permuted) ordering.
pub fn rhs_graph_block_hybrid<T: Real>(
    state: &PhaseState<T>,
    freq: &NaturalFrequencies<T>,
    coupling: T,
    graph: &CouplingGraph,
    scaling: ScalingMode,
    plan: &BlockPlan,
    counters: &EvalCounters,
) -> Result<Vec<T>> {
    let m = check_len(state, freq)?;
    check_graph(state, graph)?;
    plan.matches(graph)?;
    let start = Instant::now();
    let (sin, cos) = trig::tables(state.phases());
    let nb = plan.num_blocks();

    // Per-column-block sums, built once and shared by every row block.
    let mut block_sin = vec![T::zero(); nb];
    let mut block_cos = vec![T::zero(); nb];
    for (j, cols) in plan.blocks().iter().enumerate() {
        let used = (0..nb).any(|i| plan.mode(i, j) == SumMode::PrecomputeSubtract);
        if used {
            block_sin[j] = cols.clone().map(|l| sin[l]).sum();
            block_cos[j] = cols.clone().map(|l| cos[l]).sum();
        }
    }

    let mut row_block = vec![0usize; m];
    for (i, rows) in plan.blocks().iter().enumerate() {
        for r in rows.clone() {
            row_block[r] = i;
        }
    }

    let omega = freq.as_slice();
    let mut out = vec![T::zero(); m];
    fill_rows(&mut out, |r| {
        let Some(factor) = row_factor(coupling, scaling, graph, r) else {
            return omega[r];
        };
        let i = row_block[r];
        let mut acc_sin = T::zero();
        let mut acc_cos = T::zero();
        for j in 0..nb {
            let stored = plan.row_indices(i, j, r);
            match plan.mode(i, j) {
                SumMode::NonzeroSum => {
                    for &l in stored {
                        acc_sin += sin[l];
                        acc_cos += cos[l];
                    }
                }
                SumMode::PrecomputeSubtract => {
                    let mut bs = block_sin[j];
                    let mut bc = block_cos[j];
                    for &l in stored {
                        bs -= sin[l];
                        bc -= cos[l];
                    }
                    acc_sin += bs;
                    acc_cos += bc;
                }
            }
        }
        omega[r] + factor * (acc_sin * cos[r] - acc_cos * sin[r])
    });
    counters.add_sin(m as u64);
    counters.add_cos(m as u64);
    counters.add_table(2 * m as u64);
    counters.add_wall(start.elapsed());
    Ok(out)
}

/// Names of the available strategies, used by the CLI and bench output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    ClassicalNaive,
    ClassicalOrderParam,
    GraphNaive,
    GraphMatvec,
    GraphBlockHybrid,
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::ClassicalNaive => "classical-naive",
            StrategyKind::ClassicalOrderParam => "classical-order-param",
            StrategyKind::GraphNaive => "graph-naive",
            StrategyKind::GraphMatvec => "graph-matvec",
            StrategyKind::GraphBlockHybrid => "graph-block-hybrid",
        }
    }

    pub fn is_classical(&self) -> bool {
        matches!(self, StrategyKind::ClassicalNaive | StrategyKind::ClassicalOrderParam)
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = KuramotoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classical-naive" | "naive" => Ok(StrategyKind::ClassicalNaive),
            "classical-order-param" | "order-param" => Ok(StrategyKind::ClassicalOrderParam),
            "graph-naive" => Ok(StrategyKind::GraphNaive),
            "graph-matvec" | "matvec" => Ok(StrategyKind::GraphMatvec),
            "graph-block-hybrid" | "block-hybrid" => Ok(StrategyKind::GraphBlockHybrid),
            other => Err(KuramotoError::InvalidInput(format!(
                "unknown strategy '{other}'"
            ))),
        }
    }
}

/// A fully bound right-hand side: frequencies, coupling constant, and the
/// chosen evaluation strategy with its topology. This is what the time
/// integrators consume.
#[derive(Debug, Clone)]
pub struct Rhs<'a, T: Real> {
    freq: &'a NaturalFrequencies<T>,
    coupling: T,
    kind: RhsKind<'a>,
}

#[derive(Debug, Clone)]
enum RhsKind<'a> {
    ClassicalNaive,
    ClassicalOrderParam,
    Graph {
        graph: &'a CouplingGraph,
        scaling: ScalingMode,
        variant: GraphVariant<'a>,
    },
}

#[derive(Debug, Clone)]
enum GraphVariant<'a> {
    Naive,
    Matvec,
    BlockHybrid(&'a BlockPlan),
}

impl<'a, T: Real> Rhs<'a, T> {
    pub fn classical_naive(freq: &'a NaturalFrequencies<T>, coupling: T) -> Self {
        Self {
            freq,
            coupling,
            kind: RhsKind::ClassicalNaive,
        }
    }

    pub fn classical_order_param(freq: &'a NaturalFrequencies<T>, coupling: T) -> Self {
        Self {
            freq,
            coupling,
            kind: RhsKind::ClassicalOrderParam,
        }
    }

    pub fn graph_naive(
        freq: &'a NaturalFrequencies<T>,
        coupling: T,
        graph: &'a CouplingGraph,
        scaling: ScalingMode,
    ) -> Self {
        Self {
            freq,
            coupling,
            kind: RhsKind::Graph {
                graph,
                scaling,
                variant: GraphVariant::Naive,
            },
        }
    }

    pub fn graph_matvec(
        freq: &'a NaturalFrequencies<T>,
        coupling: T,
        graph: &'a CouplingGraph,
        scaling: ScalingMode,
    ) -> Self {
        Self {
            freq,
            coupling,
            kind: RhsKind::Graph {
                graph,
                scaling,
                variant: GraphVariant::Matvec,
            },
        }
    }

    pub fn graph_block_hybrid(
        freq: &'a NaturalFrequencies<T>,
        coupling: T,
        graph: &'a CouplingGraph,
        scaling: ScalingMode,
        plan: &'a BlockPlan,
    ) -> Self {
        Self {
            freq,
            coupling,
            kind: RhsKind::Graph {
                graph,
                scaling,
                variant: GraphVariant::BlockHybrid(plan),
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.freq.len()
    }

    pub fn frequencies(&self) -> &NaturalFrequencies<T> {
        self.freq
    }

    pub fn coupling(&self) -> T {
        self.coupling
    }

    pub fn strategy(&self) -> StrategyKind {
        match &self.kind {
            RhsKind::ClassicalNaive => StrategyKind::ClassicalNaive,
            RhsKind::ClassicalOrderParam => StrategyKind::ClassicalOrderParam,
            RhsKind::Graph { variant, .. } => match variant {
                GraphVariant::Naive => StrategyKind::GraphNaive,
                GraphVariant::Matvec => StrategyKind::GraphMatvec,
                GraphVariant::BlockHybrid(_) => StrategyKind::GraphBlockHybrid,
            },
        }
    }

    pub fn eval(&self, state: &PhaseState<T>, counters: &EvalCounters) -> Result<Vec<T>> {
        match &self.kind {
            RhsKind::ClassicalNaive => {
                rhs_classical_naive(state, self.freq, self.coupling, counters)
            }
            RhsKind::ClassicalOrderParam => {
                rhs_classical_order_param(state, self.freq, self.coupling, counters)
            }
            RhsKind::Graph {
                graph,
                scaling,
                variant,
            } => match variant {
                GraphVariant::Naive => {
                    rhs_graph_naive(state, self.freq, self.coupling, graph, *scaling, counters)
                }
                GraphVariant::Matvec => {
                    rhs_graph_matvec(state, self.freq, self.coupling, graph, *scaling, counters)
                }
                GraphVariant::BlockHybrid(plan) => rhs_graph_block_hybrid(
                    state,
                    self.freq,
                    self.coupling,
                    graph,
                    *scaling,
                    plan,
                    counters,
                ),
            },
        }
    }

    /// Potential matching this model: the classical closed form, or the
    /// graph potential built from the scaled adjacency matrix.
    pub fn potential(&self, state: &PhaseState<T>) -> Result<T> {
        match &self.kind {
            RhsKind::ClassicalNaive | RhsKind::ClassicalOrderParam => {
                diagnostics::potential_classical(state, self.freq, self.coupling)
            }
            RhsKind::Graph { graph, scaling, .. } => {
                diagnostics::potential_graph(state, self.freq, self.coupling, graph, *scaling)
            }
        }
    }
}
