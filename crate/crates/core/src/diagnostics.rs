//! Order parameters, potentials, and the conserved quantity used to verify
//! integration reliability.

use crate::error::{KuramotoError, Result};
use crate::graph::CouplingGraph;
use crate::model::{NaturalFrequencies, PhaseState, ScalingMode};
use crate::scalar::{from_usize, lit, Real};
use crate::trig;

/// Modulus and angle of the complex order parameter r e^{iψ} = C_M + i S_M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderParameter<T: Real> {
    /// Modulus in [0, 1]; values near one indicate synchronisation.
    pub r: T,
    /// Angle in radians; fixed to 0 when r = 0.
    pub psi: T,
}

/// Computes r = sqrt(C_M² + S_M²) and ψ = atan2(S_M, C_M) from the mean
/// phasor sums.
pub fn order_parameter<T: Real>(state: &PhaseState<T>) -> OrderParameter<T> {
    let m = from_usize::<T>(state.len());
    let mut s = T::zero();
    let mut c = T::zero();
    for &p in state.phases() {
        let (ps, pc) = p.sin_cos();
        s += ps;
        c += pc;
    }
    s = s / m;
    c = c / m;
    let r = (s * s + c * c).sqrt();
    let psi = if r == T::zero() { T::zero() } else { s.atan2(c) };
    OrderParameter { r, psi }
}

/// Potential of the classical model, via the order-parameter closed form:
/// V = −ωᵀθ + (K M / 2) (1 − C_M² − S_M²).
pub fn potential_classical<T: Real>(
    state: &PhaseState<T>,
    freq: &NaturalFrequencies<T>,
    coupling: T,
) -> Result<T> {
    if state.len() != freq.len() {
        return Err(KuramotoError::LengthMismatch {
            expected: state.len(),
            got: freq.len(),
        });
    }
    let m = from_usize::<T>(state.len());
    let (sin, cos) = trig::tables(state.phases());
    let s_mean = sin.iter().copied().sum::<T>() / m;
    let c_mean = cos.iter().copied().sum::<T>() / m;
    let drift: T = state
        .phases()
        .iter()
        .zip(freq.as_slice())
        .map(|(&p, &w)| w * p)
        .sum();
    Ok(-drift + coupling * m * lit::<T>(0.5) * (T::one() - c_mean * c_mean - s_mean * s_mean))
}

/// Potential of the graph model built from the scaled adjacency matrix 𝒜:
/// V = −ωᵀθ + (K/2) (Σ𝒜 − cos(θ)ᵀ(𝒜 cos θ) − sin(θ)ᵀ(𝒜 sin θ)).
///
/// The gradient relation −∇V = G holds when 𝒜 is symmetric (symmetric graph
/// with uniform scaling); the value is computable for any input.
pub fn potential_graph<T: Real>(
    state: &PhaseState<T>,
    freq: &NaturalFrequencies<T>,
    coupling: T,
    graph: &CouplingGraph,
    scaling: ScalingMode,
) -> Result<T> {
    if state.len() != freq.len() {
        return Err(KuramotoError::LengthMismatch {
            expected: state.len(),
            got: freq.len(),
        });
    }
    if state.len() != graph.size() {
        return Err(KuramotoError::LengthMismatch {
            expected: state.len(),
            got: graph.size(),
        });
    }
    let (sin, cos) = trig::tables(state.phases());
    let (row_sin, row_cos) = trig::adjacency_sums(graph, &sin, &cos);

    // Row scale 1/M_m and the time-independent total Σ𝒜 from cached degrees.
    let mut scaled_total = T::zero();
    let mut quad = T::zero();
    let m_inv = T::one() / from_usize::<T>(graph.size());
    for i in 0..graph.size() {
        let scale = match scaling {
            ScalingMode::Uniform => m_inv,
            ScalingMode::NonUniform => {
                if graph.degree(i) == 0 {
                    continue;
                }
                T::one() / from_usize::<T>(graph.degree(i))
            }
        };
        scaled_total += scale * from_usize::<T>(graph.degree(i));
        quad += scale * (cos[i] * row_cos[i] + sin[i] * row_sin[i]);
    }
    let drift: T = state
        .phases()
        .iter()
        .zip(freq.as_slice())
        .map(|(&p, &w)| w * p)
        .sum();
    Ok(-drift + coupling * lit::<T>(0.5) * (scaled_total - quad))
}

/// The conserved quantity Σ_m (θ_m(t) − ω_m (t − t₀) − θ_m(t₀)).
///
/// Exact flows of the classical model (and of symmetric graphs with uniform
/// scaling) keep this at zero; non-uniform or asymmetric couplings generally
/// do not.
pub fn conserved_residual<T: Real>(
    state: &PhaseState<T>,
    freq: &NaturalFrequencies<T>,
    initial: &PhaseState<T>,
) -> Result<T> {
    if state.len() != freq.len() || state.len() != initial.len() {
        return Err(KuramotoError::LengthMismatch {
            expected: state.len(),
            got: freq.len().min(initial.len()),
        });
    }
    let elapsed = state.time() - initial.time();
    let mut acc = T::zero();
    for i in 0..state.len() {
        acc += state.phase(i) - freq.get(i) * elapsed - initial.phase(i);
    }
    Ok(acc)
}
