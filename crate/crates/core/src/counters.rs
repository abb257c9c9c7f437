//! Exact accounting of trigonometric evaluations and wall time per RHS call.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

/// Accumulating counters for sine/cosine evaluations and wall time.
///
/// `sin_evals`/`cos_evals` follow the per-strategy counting conventions of the
/// right-hand-side evaluators (the naive double loop counts one sine per
/// coupling term; the order-parameter form counts 2M sines + 2M cosines per
/// call even though the implementation builds the trig tables only once).
/// `table_trig_evals` separately records the trig-table entries actually
/// built (2M per call for every reformulated strategy, 0 for naive loops),
/// so both conventions can be reported side by side.
///
/// Counters only increase during evaluations; [`reset`](Self::reset) is explicit.
/// Accumulation is atomic, so concurrent evaluations may share one instance.
#[derive(Debug, Default)]
pub struct EvalCounters {
    sin_evals: AtomicU64,
    cos_evals: AtomicU64,
    table_trig_evals: AtomicU64,
    wall_nanos: AtomicU64,
}

/// Plain-value copy of counter readings, convenient for deltas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CounterSnapshot {
    pub sin_evals: u64,
    pub cos_evals: u64,
    pub table_trig_evals: u64,
    pub wall_nanos: u64,
}

impl CounterSnapshot {
    pub fn trig_evals(&self) -> u64 {
        self.sin_evals + self.cos_evals
    }

    pub fn wall_seconds(&self) -> f64 {
        self.wall_nanos as f64 * 1e-9
    }

    /// Component-wise difference `self - earlier`.
    pub fn since(&self, earlier: &CounterSnapshot) -> CounterSnapshot {
        CounterSnapshot {
            sin_evals: self.sin_evals - earlier.sin_evals,
            cos_evals: self.cos_evals - earlier.cos_evals,
            table_trig_evals: self.table_trig_evals - earlier.table_trig_evals,
            wall_nanos: self.wall_nanos - earlier.wall_nanos,
        }
    }
}

impl EvalCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sin(&self, n: u64) {
        self.sin_evals.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_cos(&self, n: u64) {
        self.cos_evals.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_table(&self, n: u64) {
        self.table_trig_evals.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_wall(&self, elapsed: Duration) {
        self.wall_nanos
            .fetch_add(elapsed.as_nanos() as u64, Ordering::Relaxed);
    }

    pub fn sin_evals(&self) -> u64 {
        self.sin_evals.load(Ordering::Relaxed)
    }

    pub fn cos_evals(&self) -> u64 {
        self.cos_evals.load(Ordering::Relaxed)
    }

    pub fn trig_evals(&self) -> u64 {
        self.sin_evals() + self.cos_evals()
    }

    pub fn table_trig_evals(&self) -> u64 {
        self.table_trig_evals.load(Ordering::Relaxed)
    }

    pub fn wall_seconds(&self) -> f64 {
        self.wall_nanos.load(Ordering::Relaxed) as f64 * 1e-9
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            sin_evals: self.sin_evals(),
            cos_evals: self.cos_evals(),
            table_trig_evals: self.table_trig_evals(),
            wall_nanos: self.wall_nanos.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.sin_evals.store(0, Ordering::Relaxed);
        self.cos_evals.store(0, Ordering::Relaxed);
        self.table_trig_evals.store(0, Ordering::Relaxed);
        self.wall_nanos.store(0, Ordering::Relaxed);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulates_and_resets() {
        let c = EvalCounters::new();
        c.add_sin(10);
        c.add_cos(4);
        c.add_table(14);
        assert_eq!(c.trig_evals(), 14);
        assert_eq!(c.table_trig_evals(), 14);
        let snap = c.snapshot();
        c.add_sin(1);
        assert_eq!(c.snapshot().since(&snap).sin_evals, 1);
        c.reset();
        assert_eq!(c.trig_evals(), 0);
    }
}
