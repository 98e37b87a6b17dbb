//! Semilinear stochastic heat equation instances
//! `dU + [A U + f(t, U)] dt = sigma(t) dW`, `f(t, v)(x) = -eta(t, v(x))`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{sin_pi, Scalar};
use crate::spatial::{Discretization, GridFunction, InitialCondition};

pub const BUILTIN_PROBLEMS: [&str; 4] =
    ["weierstrass-sigma1", "weierstrass-sigma2", "zero-noise", "linear-drift"];

/// Truncated Weierstrass function `sum_{n=0}^{J} a^n cos(b^n pi v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassParams {
    a: f64,
    b: u64,
    terms: u32,
}

impl WeierstrassParams {
    pub fn new(a: f64, b: u64, terms: u32) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::invalid("a", format!("must lie in (0, 1), got {a}")));
        }
        if b.is_multiple_of(2) {
            return Err(Error::invalid("b", format!("must be an odd positive integer, got {b}")));
        }
        Ok(Self { a, b, terms })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn terms(&self) -> u32 {
        self.terms
    }

    /// Whether `a b > 1 + 3 pi / 2`, the classical nowhere-differentiability condition.
    pub fn is_classical(&self) -> bool {
        self.a * self.b as f64 > 1.0 + 1.5 * std::f64::consts::PI
    }

    /// `sum_{n<=J} (a b)^n pi`, a Lipschitz constant of the truncated sum.
    pub fn lipschitz_bound(&self) -> f64 {
        let ab = self.a * self.b as f64;
        (0..=self.terms).map(|n| ab.powi(n as i32) * std::f64::consts::PI).sum()
    }

    pub fn eval<T: Scalar>(&self, v: T) -> T {
        let mut sum = T::zero();
        let mut an = T::one();
        let mut bn = T::one();
        let (a, b) = (T::of(self.a), T::of(self.b as f64));
        for _ in 0..=self.terms {
            sum = sum + an * (bn * T::PI() * v).cos();
            an = an * a;
            bn = bn * b;
        }
        sum
    }
}

impl Default for WeierstrassParams {
    fn default() -> Self {
        Self { a: 0.9, b: 7, terms: 5 }
    }
}

/// The scalar function `eta(t, v)` inducing the Nemytskii drift.
#[derive(Clone)]
pub enum Drift<T> {
    Zero,
    /// `eta(t, v) = rate v`.
    Linear {
        rate: f64,
    },
    Weierstrass(WeierstrassParams),
    Custom(Arc<dyn Fn(T, T) -> T + Send + Sync>),
}

impl<T: Scalar> Drift<T> {
    pub fn eta(&self, t: T, v: T) -> T {
        match self {
            Drift::Zero => T::zero(),
            Drift::Linear { rate } => T::of(*rate) * v,
            Drift::Weierstrass(p) => p.eval(v),
            Drift::Custom(f) => f(t, v),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Drift::Zero)
    }
}

impl<T> fmt::Debug for Drift<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drift::Zero => f.write_str("Zero"),
            Drift::Linear { rate } => write!(f, "Linear({rate})"),
            Drift::Weierstrass(p) => write!(f, "Weierstrass({:?})", p),
            Drift::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// Noise intensity `sigma(t)`, with `g(t) = sigma(t) Id`.
#[derive(Clone)]
pub enum NoiseIntensity<T> {
    Zero,
    /// `3 sqrt(t)`.
    Sigma1,
    /// `4 sqrt(|sin(16 pi t)|)`.
    Sigma2,
    Constant(f64),
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Scalar> NoiseIntensity<T> {
    pub fn eval(&self, t: T) -> Result<T> {
        match self {
            NoiseIntensity::Zero => Ok(T::zero()),
            NoiseIntensity::Sigma1 => sigma1(t),
            NoiseIntensity::Sigma2 => sigma2(t),
            NoiseIntensity::Constant(c) => Ok(T::of(*c)),
            NoiseIntensity::Custom(f) => Ok(f(t)),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NoiseIntensity::Zero)
    }

    pub fn label(&self) -> &'static str {
        match self {
            NoiseIntensity::Zero => "zero",
            NoiseIntensity::Sigma1 => "sigma1",
            NoiseIntensity::Sigma2 => "sigma2",
            NoiseIntensity::Constant(_) => "constant",
            NoiseIntensity::Custom(_) => "custom",
        }
    }
}

impl<T> fmt::Debug for NoiseIntensity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseIntensity::Zero => f.write_str("Zero"),
            NoiseIntensity::Sigma1 => f.write_str("Sigma1"),
            NoiseIntensity::Sigma2 => f.write_str("Sigma2"),
            NoiseIntensity::Constant(c) => write!(f, "Constant({c})"),
            NoiseIntensity::Custom(_) => f.write_str("Custom"),
        }
    }
}

fn check_time<T: Scalar>(t: T) -> Result<()> {
    if !(t >= T::zero()) {
        return Err(Error::invalid("t", format!("noise intensity needs t >= 0, got {t}")));
    }
    Ok(())
}

pub fn sigma1<T: Scalar>(t: T) -> Result<T> {
    check_time(t)?;
    Ok(T::of(3.0) * t.sqrt())
}

/// Vanishes exactly on the grid `n / 16`.
pub fn sigma2<T: Scalar>(t: T) -> Result<T> {
    check_time(t)?;
    Ok(T::of(4.0) * sin_pi(T::of(16.0) * t).abs().sqrt())
}

pub fn eval_weierstrass<T: Scalar>(params: &WeierstrassParams, v: T) -> T {
    params.eval(v)
}

#[derive(Clone, Debug)]
pub struct ProblemSpec<T> {
    pub name: String,
    pub drift: Drift<T>,
    pub sigma: NoiseIntensity<T>,
    pub initial: InitialCondition<T>,
    pub horizon: T,
    /// `(r, gamma)` regularity exponents, reported only.
    pub regularity: Option<(f64, f64)>,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn new(
        name: impl Into<String>,
        drift: Drift<T>,
        sigma: NoiseIntensity<T>,
        initial: InitialCondition<T>,
        horizon: T,
    ) -> Result<Self> {
        if !(horizon > T::zero()) {
            return Err(Error::invalid("horizon_T", "final time must be positive"));
        }
        let ends = [initial.eval(T::zero()), initial.eval(T::one())];
        if ends.iter().any(|v| v.abs() > T::of(1e-12)) {
            return Err(Error::invalid("initial", "initial condition must vanish at 0 and 1"));
        }
        Ok(Self { name: name.into(), drift, sigma, initial, horizon, regularity: None })
    }

    pub fn with_drift(mut self, drift: Drift<T>) -> Self {
        self.drift = drift;
        self
    }

    pub fn with_sigma(mut self, sigma: NoiseIntensity<T>) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_horizon(mut self, horizon: T) -> Result<Self> {
        if !(horizon > T::zero()) {
            return Err(Error::invalid("horizon_T", "final time must be positive"));
        }
        self.horizon = horizon;
        Ok(self)
    }

    /// Non-fatal remarks about the parameters.
    pub fn warnings(&self) -> Vec<String> {
        match &self.drift {
            Drift::Weierstrass(p) if !p.is_classical() => {
                vec![format!("a b = {} does not exceed 1 + 3 pi / 2", p.a() * p.b() as f64)]
            }
            _ => Vec::new(),
        }
    }
}

/// The registered problems: Weierstrass drift with `(a, b, J) = (0.9, 7, 5)`,
/// initial value `2 x (1 - x)` and `T = 1`.
pub fn builtin_problem<T: Scalar>(name: &str) -> Result<ProblemSpec<T>> {
    let weierstrass = Drift::Weierstrass(WeierstrassParams::default());
    let (drift, sigma) = match name {
        "weierstrass-sigma1" => (weierstrass, NoiseIntensity::Sigma1),
        "weierstrass-sigma2" => (weierstrass, NoiseIntensity::Sigma2),
        "zero-noise" => (weierstrass, NoiseIntensity::Zero),
        "linear-drift" => (Drift::Linear { rate: 1.0 }, NoiseIntensity::Zero),
        _ => return Err(Error::UnknownProblem(name.to_string())),
    };
    let mut p = ProblemSpec::new(name, drift, sigma, InitialCondition::quadratic_bump(), T::one())?;
    if name.starts_with("weierstrass") {
        p.regularity = Some((1.0, 0.5));
    }
    Ok(p)
}

/// `f_h(t, v) = -eta(t, v(x))` evaluated in the space of `v`.
pub fn eval_drift<T: Scalar, D: Discretization<T> + ?Sized>(
    problem: &ProblemSpec<T>,
    t: T,
    v: &GridFunction<T>,
    space: &D,
) -> Result<GridFunction<T>> {
    if problem.drift.is_zero() {
        space.check_bound(v)?;
        return Ok(space.zeros());
    }
    let drift = &problem.drift;
    space.nemytskii(v, &|x, vx| {
        let value = -drift.eta(t, vx);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite {
                context: format!("evaluating the drift at t = {t}, x = {x}, v = {vx}"),
                value: value.as_f64(),
            })
        }
    })
}
