//! Reliable and efficient numerical integration of the Kuramoto model and
//! Kuramoto models on graphs.
//!
//! The crate provides:
//!
//! - right-hand-side evaluation strategies ([`rhs`]): the straightforward
//!   double loop, the order-parameter reformulation built on precomputed
//!   sums, stored-index matrix-vector traversal for graphs, and a
//!   block-hybrid scheme that chooses per submatrix between summing nonzero
//!   terms and subtracting zero terms from precomputed block sums;
//! - diagnostics ([`diagnostics`]): order parameters, potentials, and the
//!   conserved phase-sum residual;
//! - time integrators ([`integrators`]): explicit Euler, Heun, adaptive
//!   fourth-order Runge-Kutta, and the implicit midpoint rule;
//! - community detection ([`community`]): greedy minimization of the
//!   edge-density Potts objective with Louvain-style aggregation, matrix
//!   reordering, and the blocking-quality score;
//! - reproducible instance generators ([`generators`]) and Matrix
//!   Market/CSV I/O ([`io`]).
//!
//! All numeric code is generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the `*64` aliases below pin the default `f64` choice.

pub mod community;
pub mod counters;
pub mod diagnostics;
pub mod error;
pub mod generators;
pub mod graph;
pub mod integrators;
pub mod io;
pub mod model;
pub mod partition;
pub mod plan;
pub mod rhs;
pub mod scalar;
mod trig;

pub use counters::{CounterSnapshot, EvalCounters};
pub use error::{KuramotoError, Result};
pub use graph::{CouplingGraph, RowIndices};
pub use model::{NaturalFrequencies, PhaseState, ScalingMode, Trajectory};
pub use partition::BlockPartition;
pub use plan::{plan_blocks, BlockPlan, SumMode};
pub use rhs::{Rhs, StrategyKind};
pub use scalar::Real;

/// Concrete `f64` aliases for the generic core types.
pub type PhaseState64 = model::PhaseState<f64>;
pub type NaturalFrequencies64 = model::NaturalFrequencies<f64>;
pub type Trajectory64 = model::Trajectory<f64>;
pub type OrderParameter64 = diagnostics::OrderParameter<f64>;
pub type StepController64 = integrators::StepController<f64>;
pub type Rhs64<'a> = rhs::Rhs<'a, f64>;
