//! Time steppers on the uniform grid `t_n = n k`.
//!
//! The randomized method advances `X^{n-1}` in two stages,
//!
//! ```text
//! X^{n,tau} = S_{tau k}[X^{n-1} - tau k f(t_{n-1}, X^{n-1})     + g(t_{n-1})   D_{tau k} W]
//! X^n       = S_{k}    [X^{n-1} -     k f(t_{n-1} + tau k, X^{n,tau}) + g(t_{n-1} + tau k) D_k W]
//! ```
//!
//! with `S_kappa = (Id + kappa A_h)^{-1} P_h` and `tau ~ U(0, 1)` redrawn each
//! step. Setting `tau = 0` collapses it to the linearly-implicit Euler method,
//! which is the classical stepper below.

use crate::error::{Error, Result};
use crate::noise::{
    full_step_increment_at, increment_to_gridfunction, BridgeKey, BrownianStore, CovarianceSpec,
    WienerIncrement,
};
use crate::problem::{eval_drift, ProblemSpec};
use crate::rng::{Domain, KeyedStreams};
use crate::scalar::Scalar;
use crate::spatial::{Discretization, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Randomized,
    Classical,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Randomized => "randomized",
            Method::Classical => "classical",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "randomized" => Some(Method::Randomized),
            "classical" => Some(Method::Classical),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TauMode {
    Sample,
    Fixed(f64),
    /// `tau_n = values[n - 1]`.
    Injected(Vec<f64>),
}

/// Reduced stage-one truncation `floor(sqrt(M)) + 1`, capped at `M`.
pub fn reduced_inner_modes(truncation: usize) -> usize {
    ((truncation as f64).sqrt().floor() as usize + 1).min(truncation)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig<T> {
    step_k: T,
    n_steps: usize,
    method: Method,
    truncation_m: usize,
    inner_modes: usize,
    tau_mode: TauMode,
}

impl<T: Scalar> SchemeConfig<T> {
    /// `n_steps` equal steps of size `horizon / n_steps`.
    pub fn new(horizon: T, n_steps: usize, method: Method, truncation_m: usize) -> Result<Self> {
        if !(horizon > T::zero()) {
            return Err(Error::invalid("horizon_T", "final time must be positive"));
        }
        if truncation_m == 0 {
            return Err(Error::invalid("truncation_M", "at least one noise mode is required"));
        }
        let step_k = if n_steps == 0 { horizon } else { horizon / T::of_usize(n_steps) };
        Ok(Self {
            step_k,
            n_steps,
            method,
            truncation_m,
            inner_modes: truncation_m,
            tau_mode: TauMode::Sample,
        })
    }

    /// Step `k = horizon 2^-exponent`.
    pub fn dyadic(horizon: T, exponent: u32, method: Method, truncation_m: usize) -> Result<Self> {
        Self::new(horizon, 1usize << exponent, method, truncation_m)
    }

    pub fn with_inner_modes(mut self, inner: usize) -> Result<Self> {
        if inner == 0 || inner > self.truncation_m {
            return Err(Error::invalid(
                "inner_modes",
                format!("must lie in [1, {}], got {inner}", self.truncation_m),
            ));
        }
        self.inner_modes = inner;
        Ok(self)
    }

    pub fn with_tau(mut self, tau_mode: TauMode) -> Self {
        self.tau_mode = tau_mode;
        self
    }

    pub fn step_k(&self) -> T {
        self.step_k
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn truncation_m(&self) -> usize {
        self.truncation_m
    }

    pub fn inner_modes(&self) -> usize {
        self.inner_modes
    }

    pub fn tau_mode(&self) -> &TauMode {
        &self.tau_mode
    }
}

/// Identifies the random streams of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrajectoryKey {
    pub master: u64,
    pub sample: u64,
    /// Distinguishes runs sharing a noise path (method, step size, reference).
    pub run: u64,
}

/// A noise path together with its covariance.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSource<'a, T> {
    pub store: &'a BrownianStore,
    pub cov: &'a CovarianceSpec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState<T> {
    pub current: GridFunction<T>,
    pub time_index: usize,
    pub tau_log: Vec<f64>,
}

pub fn init_state<T: Scalar, D: Discretization<T> + ?Sized>(
    space: &D,
    problem: &ProblemSpec<T>,
) -> Result<TrajectoryState<T>> {
    Ok(TrajectoryState {
        current: space.project_initial(&problem.initial)?,
        time_index: 0,
        tau_log: Vec::new(),
    })
}

/// Which states [`Stepper::run`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Record {
    All,
    FinalOnly,
    /// Every `stride`-th state, plus the final one.
    Every(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    /// `(n, X^n)` pairs in increasing `n`.
    pub states: Vec<(usize, GridFunction<T>)>,
    pub tau_log: Vec<f64>,
}

impl<T> Trajectory<T> {
    pub fn final_state(&self) -> &GridFunction<T> {
        &self.states.last().expect("trajectory holds the initial state").1
    }
}

/// Everything one trajectory needs, borrowed from shared immutable data.
pub struct Stepper<'a, T: Scalar, D: Discretization<T> + ?Sized> {
    config: &'a SchemeConfig<T>,
    space: &'a D,
    problem: &'a ProblemSpec<T>,
    noise: Option<NoiseSource<'a, T>>,
    key: TrajectoryKey,
    tau_streams: KeyedStreams,
    ref_per_step: usize,
}

impl<'a, T: Scalar, D: Discretization<T> + ?Sized> Stepper<'a, T, D> {
    pub fn new(
        config: &'a SchemeConfig<T>,
        space: &'a D,
        problem: &'a ProblemSpec<T>,
        noise: Option<NoiseSource<'a, T>>,
        key: TrajectoryKey,
    ) -> Result<Self> {
        let ref_per_step = match &noise {
            Some(src) => {
                if src.cov.truncation() != config.truncation_m() {
                    return Err(Error::invalid(
                        "truncation_M",
                        format!(
                            "scheme uses M = {}, covariance has {}",
                            config.truncation_m(),
                            src.cov.truncation()
                        ),
                    ));
                }
                src.store.grid_index(config.step_k().as_f64())?
            }
            None => 0,
        };
        if noise.is_some() && ref_per_step == 0 {
            return Err(Error::invalid("step_k", "step is shorter than the reference step"));
        }
        if let TauMode::Injected(v) = config.tau_mode() {
            if v.len() < config.n_steps() {
                return Err(Error::invalid("tau_mode", "injected sequence shorter than the run"));
            }
        }
        Ok(Self {
            config,
            space,
            problem,
            noise,
            key,
            tau_streams: KeyedStreams::new(Domain::Tau, key.master, key.sample, key.run),
            ref_per_step,
        })
    }

    fn draw_tau(&self, n: usize) -> f64 {
        match self.config.tau_mode() {
            TauMode::Sample => self.tau_streams.uniform_at(0, n as u64),
            TauMode::Fixed(t) => *t,
            TauMode::Injected(v) => v[n - 1],
        }
    }

    fn full_increment(&self, n: usize) -> Result<WienerIncrement<T>> {
        let src = self.noise.ok_or(Error::MissingNoise)?;
        full_step_increment_at(src.store, src.cov, (n - 1) * self.ref_per_step, self.ref_per_step)
    }

    /// `S_kappa [x_prev - kappa f(t_eval, x_eval) + sigma (noise)]`.
    fn stage(
        &self,
        x_prev: &GridFunction<T>,
        t_eval: T,
        x_eval: &GridFunction<T>,
        kappa: T,
        noise: Option<(T, &GridFunction<T>)>,
    ) -> Result<GridFunction<T>> {
        let mut rhs = x_prev.clone();
        if !self.problem.drift.is_zero() {
            let f = eval_drift(self.problem, t_eval, x_eval, self.space)?;
            rhs.axpy(-kappa, &f)?;
        }
        if let Some((sigma, dw)) = noise {
            rhs.axpy(sigma, dw)?;
        }
        self.space.resolvent_solve(kappa, &rhs)
    }

    fn check_step(&self, state: &TrajectoryState<T>) -> Result<()> {
        if state.time_index >= self.config.n_steps() {
            let end = self.config.step_k().as_f64() * (state.time_index + 1) as f64;
            return Err(Error::NoiseExhausted {
                start: end - self.config.step_k().as_f64(),
                end,
                horizon: self.config.step_k().as_f64() * self.config.n_steps() as f64,
            });
        }
        Ok(())
    }

    fn finish(&self, state: &mut TrajectoryState<T>, next: GridFunction<T>, tau: f64) -> Result<()> {
        state.time_index += 1;
        state.tau_log.push(tau);
        if !next.is_finite() {
            return Err(Error::Diverged {
                step: state.time_index,
                tau,
                norm: self.space.norm_l2(&next).map(|n| n.as_f64()).unwrap_or(f64::NAN),
            });
        }
        state.current = next;
        Ok(())
    }

    /// One step of the randomized two-stage method.
    pub fn step_randomized(&self, state: &mut TrajectoryState<T>) -> Result<()> {
        self.check_step(state)?;
        let n = state.time_index + 1;
        let k = self.config.step_k();
        let t_prev = T::of_usize(n - 1) * k;
        let tau = self.draw_tau(n);
        let tau_t = T::of(tau);
        let t_tau = t_prev + tau_t * k;
        let sigma_prev = self.problem.sigma.eval(t_prev)?;
        let sigma_tau = self.problem.sigma.eval(t_tau)?;
        let needs_noise = sigma_tau != T::zero() || (tau > 0.0 && sigma_prev != T::zero());
        let full = if needs_noise { Some(self.full_increment(n)?) } else { None };
        let x_prev = &state.current;

        let x_stage = if tau == 0.0 {
            None
        } else {
            let noise = match &full {
                Some(full) if sigma_prev != T::zero() => {
                    let inner = self.config.inner_modes();
                    let part = if tau >= 1.0 {
                        full.clone()
                    } else {
                        let src = self.noise.expect("full increment implies a noise source");
                        let key = BridgeKey::new(self.key.master, self.key.sample, self.key.run, n as u64);
                        full.bridge(src.cov, tau, &key, inner)?
                    };
                    Some(increment_to_gridfunction(&part, self.space, Some(inner))?)
                }
                _ => None,
            };
            Some(self.stage(x_prev, t_prev, x_prev, tau_t * k, noise.as_ref().map(|g| (sigma_prev, g)))?)
        };

        let noise = match &full {
            Some(full) if sigma_tau != T::zero() => Some(increment_to_gridfunction(full, self.space, None)?),
            _ => None,
        };
        let x_eval = x_stage.as_ref().unwrap_or(x_prev);
        let next = self.stage(x_prev, t_tau, x_eval, k, noise.as_ref().map(|g| (sigma_tau, g)))?;
        self.finish(state, next, tau)
    }

    /// One step of the linearly-implicit Euler method.
    pub fn step_classical(&self, state: &mut TrajectoryState<T>) -> Result<()> {
        self.check_step(state)?;
        let n = state.time_index + 1;
        let k = self.config.step_k();
        let t_prev = T::of_usize(n - 1) * k;
        let sigma = self.problem.sigma.eval(t_prev)?;
        let noise = if sigma != T::zero() {
            Some(increment_to_gridfunction(&self.full_increment(n)?, self.space, None)?)
        } else {
            None
        };
        let next =
            self.stage(&state.current, t_prev, &state.current, k, noise.as_ref().map(|g| (sigma, g)))?;
        self.finish(state, next, 0.0)
    }

    pub fn step(&self, state: &mut TrajectoryState<T>) -> Result<()> {
        match self.config.method() {
            Method::Randomized => self.step_randomized(state),
            Method::Classical => self.step_classical(state),
        }
    }

    /// Applies the configured stepper `N_k` times from `P_h X_0`.
    pub fn run(&self, record: Record) -> Result<Trajectory<T>> {
        let mut state = init_state(self.space, self.problem)?;
        let total = self.config.n_steps();
        let keep = |n: usize| match record {
            Record::All => true,
            Record::FinalOnly => n == total,
            Record::Every(stride) => n.is_multiple_of(stride.max(1)) || n == total,
        };
        let mut states = Vec::new();
        if keep(0) {
            states.push((0, state.current.clone()));
        }
        for _ in 0..total {
            self.step(&mut state)?;
            if keep(state.time_index) {
                states.push((state.time_index, state.current.clone()));
            }
        }
        Ok(Trajectory { states, tau_log: state.tau_log })
    }
}

pub fn step_randomized<T: Scalar, D: Discretization<T> + ?Sized>(
    state: &mut TrajectoryState<T>,
    config: &SchemeConfig<T>,
    space: &D,
    problem: &ProblemSpec<T>,
    noise: Option<NoiseSource<'_, T>>,
    key: TrajectoryKey,
) -> Result<()> {
    Stepper::new(config, space, problem, noise, key)?.step_randomized(state)
}

pub fn step_classical<T: Scalar, D: Discretization<T> + ?Sized>(
    state: &mut TrajectoryState<T>,
    config: &SchemeConfig<T>,
    space: &D,
    problem: &ProblemSpec<T>,
    noise: Option<NoiseSource<'_, T>>,
) -> Result<()> {
    let key = TrajectoryKey { master: 0, sample: 0, run: 0 };
    Stepper::new(config, space, problem, noise, key)?.step_classical(state)
}

pub fn run_trajectory<T: Scalar, D: Discretization<T> + ?Sized>(
    config: &SchemeConfig<T>,
    space: &D,
    problem: &ProblemSpec<T>,
    noise: Option<NoiseSource<'_, T>>,
    key: TrajectoryKey,
    record: Record,
) -> Result<Trajectory<T>> {
    Stepper::new(config, space, problem, noise, key)?.run(record)
}
