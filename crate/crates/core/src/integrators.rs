//! Time stepping over any RHS strategy: explicit Euler, Heun's second-order
//! Runge-Kutta, classical fourth-order Runge-Kutta with step-doubling
//! adaptivity, and the implicit midpoint rule.

use crate::counters::EvalCounters;
use crate::diagnostics::{conserved_residual, order_parameter};
use crate::error::{KuramotoError, Result};
use crate::model::{PhaseState, Trajectory};
use crate::rhs::Rhs;
use crate::scalar::{lit, Real};

/// Settings of the adaptive step-size controller.
///
/// The error estimate is the weighted RMS of the step-doubling difference
/// with weights `abs_tol + rel_tol·|θ_m|`; a step is accepted when the
/// normalized error is at most one, and the next step size is
/// `safety · h · err^(−1/5)`, clamped to `[h_min, h_max]` and to a growth
/// factor in [0.2, 5].
#[derive(Debug, Clone, Copy)]
pub struct StepController<T: Real> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub h_init: T,
    pub h_min: T,
    pub h_max: T,
    pub safety: T,
}

impl<T: Real> StepController<T> {
    pub fn new(abs_tol: T, rel_tol: T, h_init: T, h_min: T, h_max: T, safety: T) -> Result<Self> {
        let ctrl = Self {
            abs_tol,
            rel_tol,
            h_init,
            h_min,
            h_max,
            safety,
        };
        ctrl.validate()?;
        Ok(ctrl)
    }

    /// Controller with abs_tol = rel_tol = tol and conventional defaults.
    pub fn with_tol(tol: T) -> Result<Self> {
        Self::new(
            tol,
            tol,
            lit(1e-2),
            lit(1e-12),
            lit(10.0),
            lit(0.9),
        )
    }

    fn validate(&self) -> Result<()> {
        let pos = [self.abs_tol, self.rel_tol, self.h_init, self.h_min, self.h_max];
        if pos.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
            return Err(KuramotoError::InvalidInput(
                "controller tolerances and step bounds must be positive and finite".into(),
            ));
        }
        if !(self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return Err(KuramotoError::InvalidInput(
                "controller needs h_min <= h_init <= h_max".into(),
            ));
        }
        if !(self.safety > T::zero() && self.safety <= T::one()) {
            return Err(KuramotoError::InvalidInput(
                "controller safety factor must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

fn check_h<T: Real>(h: T) -> Result<()> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(KuramotoError::InvalidInput(format!(
            "step size must be positive and finite, got {h}"
        )));
    }
    Ok(())
}

fn advance<T: Real>(state: &PhaseState<T>, slope: &[T], h: T, t_new: T) -> Result<PhaseState<T>> {
    let phases = state
        .phases()
        .iter()
        .zip(slope)
        .map(|(&p, &f)| p + h * f)
        .collect();
    PhaseState::new(phases, t_new)
}

/// One explicit Euler step: θ⁺ = θ + h F(θ). Exactly one RHS evaluation.
pub fn step_euler<T: Real>(
    state: &PhaseState<T>,
    rhs: &Rhs<'_, T>,
    h: T,
    counters: &EvalCounters,
) -> Result<PhaseState<T>> {
    check_h(h)?;
    let f = rhs.eval(state, counters)?;
    advance(state, &f, h, state.time() + h)
}

/// One Heun step (explicit trapezoidal rule), second order, two RHS
/// evaluations.
pub fn step_rk2<T: Real>(
    state: &PhaseState<T>,
    rhs: &Rhs<'_, T>,
    h: T,
    counters: &EvalCounters,
) -> Result<PhaseState<T>> {
    check_h(h)?;
    let t = state.time();
    let k1 = rhs.eval(state, counters)?;
    let predictor = advance(state, &k1, h, t + h)?;
    let k2 = rhs.eval(&predictor, counters)?;
    let half_h = h * lit::<T>(0.5);
    let phases = state
        .phases()
        .iter()
        .zip(k1.iter().zip(&k2))
        .map(|(&p, (&a, &b))| p + half_h * (a + b))
        .collect();
    PhaseState::new(phases, t + h)
}

/// One classical fourth-order Runge-Kutta step, four RHS evaluations.
pub fn step_rk4<T: Real>(
    state: &PhaseState<T>,
    rhs: &Rhs<'_, T>,
    h: T,
    counters: &EvalCounters,
) -> Result<PhaseState<T>> {
    check_h(h)?;
    let t = state.time();
    let half = h * lit::<T>(0.5);
    let k1 = rhs.eval(state, counters)?;
    let s2 = advance(state, &k1, half, t + half)?;
    let k2 = rhs.eval(&s2, counters)?;
    let s3 = advance(state, &k2, half, t + half)?;
    let k3 = rhs.eval(&s3, counters)?;
    let s4 = advance(state, &k3, h, t + h)?;
    let k4 = rhs.eval(&s4, counters)?;
    let sixth = h / lit::<T>(6.0);
    let two = lit::<T>(2.0);
    let phases = state
        .phases()
        .iter()
        .enumerate()
        .map(|(i, &p)| p + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
        .collect();
    PhaseState::new(phases, t + h)
}

/// One implicit midpoint step: solves θ⁺ = θ + h F((θ + θ⁺)/2) by
/// fixed-point iteration seeded with an Euler predictor, stopping when the
/// max-norm update falls below `fp_tol`.
pub fn step_implicit_midpoint<T: Real>(
    state: &PhaseState<T>,
    rhs: &Rhs<'_, T>,
    h: T,
    fp_tol: T,
    fp_max_iters: usize,
    counters: &EvalCounters,
) -> Result<PhaseState<T>> {
    check_h(h)?;
    if !(fp_tol > T::zero()) {
        return Err(KuramotoError::InvalidInput(
            "fixed-point tolerance must be positive".into(),
        ));
    }
    let t = state.time();
    let half = lit::<T>(0.5);
    let mut current = step_euler(state, rhs, h, counters)?;
    for _ in 0..fp_max_iters {
        let mid_phases: Vec<T> = state
            .phases()
            .iter()
            .zip(current.phases())
            .map(|(&a, &b)| half * (a + b))
            .collect();
        let mid = PhaseState::new(mid_phases, t + half * h)?;
        let f = rhs.eval(&mid, counters)?;
        let next = advance(state, &f, h, t + h)?;
        let delta = next
            .phases()
            .iter()
            .zip(current.phases())
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max);
        current = next;
        if delta < fp_tol {
            return Ok(current);
        }
    }
    Err(KuramotoError::NoConvergence {
        iters: fp_max_iters,
    })
}

/// Defaults for the implicit midpoint inner solve.
pub const DEFAULT_FP_TOL: f64 = 1e-12;
pub const DEFAULT_FP_MAX_ITERS: usize = 50;

/// Fixed-step methods available to [`integrate_fixed_with`].
#[derive(Debug, Clone, Copy)]
pub enum FixedMethod<T: Real> {
    Euler,
    Rk2,
    Rk4,
    ImplicitMidpoint { fp_tol: T, fp_max_iters: usize },
}

impl<T: Real> FixedMethod<T> {
    pub fn implicit_midpoint_default() -> Self {
        FixedMethod::ImplicitMidpoint {
            fp_tol: lit(DEFAULT_FP_TOL),
            fp_max_iters: DEFAULT_FP_MAX_ITERS,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FixedMethod::Euler => "euler",
            FixedMethod::Rk2 => "rk2",
            FixedMethod::Rk4 => "rk4",
            FixedMethod::ImplicitMidpoint { .. } => "implicit-midpoint",
        }
    }
}

/// Runs `n_steps` fixed steps, handing every new state to the observer.
/// Returns the final state.
pub fn integrate_fixed_with<T: Real>(
    initial: &PhaseState<T>,
    rhs: &Rhs<'_, T>,
    method: FixedMethod<T>,
    h: T,
    n_steps: usize,
    counters: &EvalCounters,
    mut on_step: impl FnMut(&PhaseState<T>),
) -> Result<PhaseState<T>> {
    check_h(h)?;
    let mut state = initial.clone();
    for _ in 0..n_steps {
        state = match method {
            FixedMethod::Euler => step_euler(&state, rhs, h, counters)?,
            FixedMethod::Rk2 => step_rk2(&state, rhs, h, counters)?,
            FixedMethod::Rk4 => step_rk4(&state, rhs, h, counters)?,
            FixedMethod::ImplicitMidpoint {
                fp_tol,
                fp_max_iters,
            } => step_implicit_midpoint(&state, rhs, h, fp_tol, fp_max_iters, counters)?,
        };
        on_step(&state);
    }
    Ok(state)
}

/// Fixed-step run that records a trajectory, sampling every `stride`-th step
/// plus the initial and final states.
pub fn integrate_fixed_trajectory<T: Real>(
    initial: &PhaseState<T>,
    rhs: &Rhs<'_, T>,
    method: FixedMethod<T>,
    h: T,
    n_steps: usize,
    stride: usize,
    counters: &EvalCounters,
) -> Result<Trajectory<T>> {
    let stride = stride.max(1);
    let mut trajectory = Trajectory::with_capacity(n_steps / stride + 2);
    push_diag_sample(&mut trajectory, rhs, initial.clone(), initial)?;
    let mut step_index = 0usize;
    let mut push_err: Option<KuramotoError> = None;
    let initial_clone = initial.clone();
    integrate_fixed_with(initial, rhs, method, h, n_steps, counters, |state| {
        if push_err.is_some() {
            return;
        }
        step_index += 1;
        if step_index % stride == 0 || step_index == n_steps {
            if let Err(e) = push_diag_sample(&mut trajectory, rhs, state.clone(), &initial_clone) {
                push_err = Some(e);
            }
        }
    })?;
    if let Some(e) = push_err {
        return Err(e);
    }
    Ok(trajectory)
}

/// Counts of the adaptive integration loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats<T: Real> {
    pub accepted: usize,
    pub rejected: usize,
    pub final_h: T,
}

/// Adaptive fourth-order Runge-Kutta driver with step-doubling error
/// estimation: each attempt compares one full step against two half steps,
/// advances with the two-half-steps solution when accepted, and samples the
/// trajectory at the requested times by linear interpolation between
/// accepted steps. The observer sees every accepted state.
pub fn integrate_adaptive_with<T: Real>(
    initial: &PhaseState<T>,
    rhs: &Rhs<'_, T>,
    t_end: T,
    ctrl: &StepController<T>,
    sample_times: &[T],
    counters: &EvalCounters,
    mut on_accept: impl FnMut(&PhaseState<T>),
) -> Result<(Trajectory<T>, StepStats<T>)> {
    ctrl.validate()?;
    let t0 = initial.time();
    if !(t_end > t0) {
        return Err(KuramotoError::InvalidInput(format!(
            "t_end ({t_end}) must exceed the initial time ({t0})"
        )));
    }
    for w in sample_times.windows(2) {
        if w[1] <= w[0] {
            return Err(KuramotoError::InvalidInput(
                "sample times must strictly increase".into(),
            ));
        }
    }
    if let (Some(&first), Some(&last)) = (sample_times.first(), sample_times.last()) {
        if first < t0 || last > t_end {
            return Err(KuramotoError::InvalidInput(
                "sample times must lie within [t0, t_end]".into(),
            ));
        }
    }

    let mut trajectory = Trajectory::with_capacity(sample_times.len());
    let mut cursor = 0usize;
    // Samples at exactly t0 use the initial state.
    while cursor < sample_times.len() && sample_times[cursor] <= t0 {
        push_diag_sample(&mut trajectory, rhs, initial.clone(), initial)?;
        cursor += 1;
    }

    let half = lit::<T>(0.5);
    let order_exp = lit::<T>(-0.2); // 1/(p+1) with p = 4
    let mut h = ctrl.h_init.min(t_end - t0).max(ctrl.h_min);
    let mut state = initial.clone();
    let mut stats = StepStats {
        accepted: 0,
        rejected: 0,
        final_h: h,
    };

    while state.time() < t_end {
        let remaining = t_end - state.time();
        let h_try = h.min(remaining);
        let full = step_rk4(&state, rhs, h_try, counters)?;
        let mid = step_rk4(&state, rhs, h_try * half, counters)?;
        let fine = step_rk4(&mid, rhs, h_try * half, counters)?;

        let m = state.len();
        let mut err_sq = T::zero();
        for i in 0..m {
            let scale = ctrl.abs_tol
                + ctrl.rel_tol * state.phase(i).abs().max(fine.phase(i).abs());
            let d = (full.phase(i) - fine.phase(i)) / scale;
            err_sq += d * d;
        }
        let err = (err_sq / crate::scalar::from_usize(m)).sqrt();

        if err <= T::one() {
            let prev = state;
            // Two half steps land on state.time() + h_try up to roundoff;
            // pin the time so the accumulated grid matches the full step.
            let fine = PhaseState::new(fine.phases().to_vec(), prev.time() + h_try)?;
            on_accept(&fine);
            stats.accepted += 1;
            emit_samples(
                &mut trajectory,
                rhs,
                initial,
                &prev,
                &fine,
                sample_times,
                &mut cursor,
            )?;
            state = fine;
            let factor = if err == T::zero() {
                lit::<T>(5.0)
            } else {
                (ctrl.safety * err.powf(order_exp)).min(lit(5.0)).max(lit(0.2))
            };
            h = (h_try * factor).min(ctrl.h_max).max(ctrl.h_min);
        } else {
            stats.rejected += 1;
            if h_try <= ctrl.h_min {
                return Err(KuramotoError::StepSizeUnderflow {
                    t: state.time().to_f64().unwrap_or(f64::NAN),
                    h: h_try.to_f64().unwrap_or(f64::NAN),
                });
            }
            let factor = (ctrl.safety * err.powf(order_exp)).max(lit(0.1));
            h = (h_try * factor).max(ctrl.h_min);
        }
    }
    stats.final_h = h;

    // Roundoff can leave the final time one ulp short of a trailing sample;
    // emit the remaining samples from the final state.
    while cursor < sample_times.len() {
        let s = PhaseState::new(state.phases().to_vec(), sample_times[cursor])?;
        push_diag_sample(&mut trajectory, rhs, s, initial)?;
        cursor += 1;
    }

    Ok((trajectory, stats))
}

/// Adaptive driver without an observer.
pub fn integrate_adaptive<T: Real>(
    initial: &PhaseState<T>,
    rhs: &Rhs<'_, T>,
    t_end: T,
    ctrl: &StepController<T>,
    sample_times: &[T],
    counters: &EvalCounters,
) -> Result<(Trajectory<T>, StepStats<T>)> {
    integrate_adaptive_with(initial, rhs, t_end, ctrl, sample_times, counters, |_| {})
}

fn emit_samples<T: Real>(
    trajectory: &mut Trajectory<T>,
    rhs: &Rhs<'_, T>,
    initial: &PhaseState<T>,
    prev: &PhaseState<T>,
    next: &PhaseState<T>,
    sample_times: &[T],
    cursor: &mut usize,
) -> Result<()> {
    while *cursor < sample_times.len() && sample_times[*cursor] <= next.time() {
        let ts = sample_times[*cursor];
        let span = next.time() - prev.time();
        let lambda = ((ts - prev.time()) / span).max(T::zero()).min(T::one());
        let phases: Vec<T> = prev
            .phases()
            .iter()
            .zip(next.phases())
            .map(|(&a, &b)| a + lambda * (b - a))
            .collect();
        let s = PhaseState::new(phases, ts)?;
        push_diag_sample(trajectory, rhs, s, initial)?;
        *cursor += 1;
    }
    Ok(())
}

fn push_diag_sample<T: Real>(
    trajectory: &mut Trajectory<T>,
    rhs: &Rhs<'_, T>,
    state: PhaseState<T>,
    initial: &PhaseState<T>,
) -> Result<()> {
    let op = order_parameter(&state);
    let v = rhs.potential(&state)?;
    let res = conserved_residual(&state, rhs.frequencies(), initial)?;
    trajectory.push_sample(state, op.r, op.psi, v, res)
}
