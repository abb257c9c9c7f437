//! Shared sine/cosine table construction and adjacency-weighted sums.

use crate::graph::{CouplingGraph, RowIndices};
use crate::scalar::Real;

/// Builds the sin(θ) and cos(θ) tables, one actual trig call per entry each.
pub(crate) fn tables<T: Real>(phases: &[T]) -> (Vec<T>, Vec<T>) {
    let mut sin = Vec::with_capacity(phases.len());
    let mut cos = Vec::with_capacity(phases.len());
    for &p in phases {
        let (s, c) = p.sin_cos();
        sin.push(s);
        cos.push(c);
    }
    (sin, cos)
}

/// Unscaled row sums (A·v, A·w) obtained by traversing the stored indices of
/// each row: direct summation for sparse-stored rows, total-minus-zeros for
/// complement-stored rows. No trig evaluations happen here.
pub(crate) fn adjacency_sums<T: Real>(
    graph: &CouplingGraph,
    v: &[T],
    w: &[T],
) -> (Vec<T>, Vec<T>) {
    let total_v: T = v.iter().copied().sum();
    let total_w: T = w.iter().copied().sum();
    let mut av = Vec::with_capacity(graph.size());
    let mut aw = Vec::with_capacity(graph.size());
    for m in 0..graph.size() {
        match graph.row(m) {
            RowIndices::Nonzero(list) => {
                let mut sv = T::zero();
                let mut sw = T::zero();
                for &l in list {
                    sv += v[l];
                    sw += w[l];
                }
                av.push(sv);
                aw.push(sw);
            }
            RowIndices::Zero(list) => {
                let mut sv = total_v;
                let mut sw = total_w;
                for &l in list {
                    sv -= v[l];
                    sw -= w[l];
                }
                av.push(sv);
                aw.push(sw);
            }
        }
    }
    (av, aw)
}
