//! Core domain types: phase states, intrinsic frequencies, scalings, trajectories.

use std::str::FromStr;

use crate::error::{KuramotoError, Result};
use crate::scalar::Real;

/// Phases of all oscillators at one instant, together with the model time.
///
/// Phases are stored on the unwrapped lift (plain reals, never reduced mod 2π):
/// the conserved quantity `Σ (θ_m(t) − ω_m t − θ_m(0))` is only meaningful on
/// the lift. Wrapping happens on display/output only, via [`wrapped_phases`].
///
/// [`wrapped_phases`]: PhaseState::wrapped_phases
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState<T: Real> {
    phases: Vec<T>,
    time: T,
}

impl<T: Real> PhaseState<T> {
    /// Builds a state, checking that there is at least one oscillator and
    /// that every phase (and the time) is finite.
    pub fn new(phases: Vec<T>, time: T) -> Result<Self> {
        if phases.is_empty() {
            return Err(KuramotoError::InvalidInput(
                "a phase state needs at least one oscillator".into(),
            ));
        }
        if !time.is_finite() || time < T::zero() {
            return Err(KuramotoError::InvalidInput(format!(
                "time must be finite and nonnegative, got {time}"
            )));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(KuramotoError::NonFiniteState);
        }
        Ok(Self { phases, time })
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    pub fn phase(&self, m: usize) -> T {
        self.phases[m]
    }

    pub fn time(&self) -> T {
        self.time
    }

    /// Phases reduced to `[0, 2π)` for display purposes.
    pub fn wrapped_phases(&self) -> Vec<T> {
        let tau = T::TAU();
        self.phases
            .iter()
            .map(|&p| {
                let w = p % tau;
                if w < T::zero() {
                    w + tau
                } else {
                    w
                }
            })
            .collect()
    }

    pub fn into_phases(self) -> Vec<T> {
        self.phases
    }
}

/// Intrinsic angular frequencies ω of the oscillators.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalFrequencies<T: Real> {
    omega: Vec<T>,
}

impl<T: Real> NaturalFrequencies<T> {
    pub fn new(omega: Vec<T>) -> Result<Self> {
        if omega.is_empty() {
            return Err(KuramotoError::InvalidInput(
                "frequencies need at least one oscillator".into(),
            ));
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(KuramotoError::InvalidInput(
                "frequencies must be finite".into(),
            ));
        }
        Ok(Self { omega })
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            omega: vec![T::zero(); m],
        }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.omega
    }

    pub fn get(&self, m: usize) -> T {
        self.omega[m]
    }
}

/// Row scaling of the coupling term.
///
/// `Uniform` divides every row by the total number of oscillators M;
/// `NonUniform` divides row m by its degree (rows of degree zero are
/// uncoupled: their coupling term is defined as zero, no division occurs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingMode {
    Uniform,
    NonUniform,
}

impl std::fmt::Display for ScalingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalingMode::Uniform => write!(f, "uniform"),
            ScalingMode::NonUniform => write!(f, "nonuniform"),
        }
    }
}

impl FromStr for ScalingMode {
    type Err = KuramotoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(ScalingMode::Uniform),
            "nonuniform" | "non-uniform" => Ok(ScalingMode::NonUniform),
            other => Err(KuramotoError::InvalidInput(format!(
                "unknown scaling mode '{other}' (expected uniform|nonuniform)"
            ))),
        }
    }
}

/// Sampled solution of an integration run with per-sample diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    sample_times: Vec<T>,
    states: Vec<PhaseState<T>>,
    order_modulus: Vec<T>,
    order_angle: Vec<T>,
    potential: Vec<T>,
    conserved_residual: Vec<T>,
}

impl<T: Real> Trajectory<T> {
    pub(crate) fn with_capacity(n: usize) -> Self {
        Self {
            sample_times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            order_modulus: Vec::with_capacity(n),
            order_angle: Vec::with_capacity(n),
            potential: Vec::with_capacity(n),
            conserved_residual: Vec::with_capacity(n),
        }
    }

    pub(crate) fn push_sample(
        &mut self,
        state: PhaseState<T>,
        r: T,
        psi: T,
        potential: T,
        residual: T,
    ) -> Result<()> {
        let t = state.time();
        if let Some(&last) = self.sample_times.last() {
            if t <= last {
                return Err(KuramotoError::InvalidInput(format!(
                    "sample times must strictly increase ({last} then {t})"
                )));
            }
        }
        self.sample_times.push(t);
        self.states.push(state);
        self.order_modulus.push(r);
        self.order_angle.push(psi);
        self.potential.push(potential);
        self.conserved_residual.push(residual);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sample_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_times.is_empty()
    }

    pub fn sample_times(&self) -> &[T] {
        &self.sample_times
    }

    pub fn states(&self) -> &[PhaseState<T>] {
        &self.states
    }

    pub fn order_modulus(&self) -> &[T] {
        &self.order_modulus
    }

    pub fn order_angle(&self) -> &[T] {
        &self.order_angle
    }

    pub fn potential(&self) -> &[T] {
        &self.potential
    }

    pub fn conserved_residual(&self) -> &[T] {
        &self.conserved_residual
    }

    /// Rewrites every sampled state, e.g. to restore the original node
    /// ordering after integrating a community-permuted system. Sample times
    /// and diagnostics stay untouched (they are permutation-invariant).
    pub fn map_states(mut self, f: impl Fn(&PhaseState<T>) -> Result<PhaseState<T>>) -> Result<Self> {
        let mut mapped = Vec::with_capacity(self.states.len());
        for s in &self.states {
            mapped.push(f(s)?);
        }
        self.states = mapped;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_rejects_empty_and_nonfinite() {
        assert!(PhaseState::<f64>::new(vec![], 0.0).is_err());
        assert!(PhaseState::new(vec![f64::NAN], 0.0).is_err());
        assert!(PhaseState::new(vec![1.0], f64::INFINITY).is_err());
        assert!(PhaseState::new(vec![0.0, 1.0], 0.0).is_ok());
    }

    #[test]
    fn wrapping_is_display_only() {
        let tau = std::f64::consts::TAU;
        let s = PhaseState::new(vec![-0.5, tau + 0.25, 3.0 * tau], 1.0).unwrap();
        // stored values untouched
        assert_eq!(s.phase(1), tau + 0.25);
        let w = s.wrapped_phases();
        assert!((w[0] - (tau - 0.5)).abs() < 1e-15);
        assert!((w[1] - 0.25).abs() < 1e-12);
        assert!(w[2].abs() < 1e-12);
    }

    #[test]
    fn scaling_mode_round_trips_from_str() {
        assert_eq!("uniform".parse::<ScalingMode>().unwrap(), ScalingMode::Uniform);
        assert_eq!(
            "non-uniform".parse::<ScalingMode>().unwrap(),
            ScalingMode::NonUniform
        );
        assert!("banana".parse::<ScalingMode>().is_err());
    }

    #[test]
    fn trajectory_requires_increasing_times() {
        let mut tr = Trajectory::<f64>::with_capacity(2);
        let s0 = PhaseState::new(vec![0.0], 0.0).unwrap();
        let s1 = PhaseState::new(vec![0.1], 0.0).unwrap();
        tr.push_sample(s0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(tr.push_sample(s1, 0.0, 0.0, 0.0, 0.0).is_err());
    }
}
