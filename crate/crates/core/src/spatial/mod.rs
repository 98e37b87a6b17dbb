//! Spatial discretizations of the Dirichlet Laplacian on (0, 1).
//!
//! Two Galerkin spaces are provided: the spectral span of the first `N`
//! sine eigenfunctions and piecewise linear finite elements on a uniform
//! mesh. Both expose the discrete generator, the resolvent solve
//! `(Id + kappa A_h)^{-1}` and the L² projection through [`Discretization`].

pub mod dst;
mod fem;
pub mod quadrature;
mod spectral;
pub mod tridiag;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use fem::FemSpace;
pub use spectral::SpectralSpace;

/// Identity of one discretization instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceId(u64);

impl SpaceId {
    pub(crate) fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        SpaceId(NEXT.fetch_add(1, Ordering::Relaxed))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Spectral,
    Fem,
}

impl SpaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpaceKind::Spectral => "spectral",
            SpaceKind::Fem => "fem",
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coefficient vector of an element of `V_h`.
///
/// Modal coefficients for the spectral space, nodal values for the finite
/// element space.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    coeffs: Vec<T>,
    space: SpaceId,
}

impl<T: Scalar> GridFunction<T> {
    pub(crate) fn from_raw(coeffs: Vec<T>, space: SpaceId) -> Self {
        Self { coeffs, space }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn space_id(&self) -> SpaceId {
        self.space
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn check_peer(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch { expected: self.space.0, found: other.space.0 });
        }
        Ok(())
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: T, other: &Self) -> Result<()> {
        self.check_peer(other)?;
        for (x, &y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x = *x + a * y;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-T::one(), other)?;
        Ok(out)
    }

    pub fn scale(&mut self, a: T) {
        for x in &mut self.coeffs {
            *x = *x * a;
        }
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }
}

/// A real function on (0, 1) with an optional closed form for its sine
/// coefficients `(u, sqrt(2) sin(j pi .))`, `j >= 1`.
#[derive(Clone)]
pub struct InitialCondition<T> {
    label: String,
    func: Arc<dyn Fn(T) -> T + Send + Sync>,
    modal: Option<Arc<dyn Fn(usize) -> T + Send + Sync>>,
}

impl<T: Scalar> InitialCondition<T> {
    pub fn new(label: impl Into<String>, func: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self { label: label.into(), func: Arc::new(func), modal: None }
    }

    pub fn with_modal(mut self, modal: impl Fn(usize) -> T + Send + Sync + 'static) -> Self {
        self.modal = Some(Arc::new(modal));
        self
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| T::zero()).with_modal(|_| T::zero())
    }

    /// `2 x (1 - x)` with coefficients `8 sqrt(2) / (j pi)^3` for odd `j`.
    pub fn quadratic_bump() -> Self {
        Self::new("2x(1-x)", |x| T::of(2.0) * x * (T::one() - x)).with_modal(|j| {
            if j % 2 == 0 {
                T::zero()
            } else {
                let jp = T::of_usize(j) * T::PI();
                T::of(8.0) * T::SQRT_2() / (jp * jp * jp)
            }
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: T) -> T {
        (self.func)(x)
    }

    pub fn modal_coefficient(&self, j: usize) -> Option<T> {
        self.modal.as_ref().map(|m| m(j))
    }

    pub fn has_modal(&self) -> bool {
        self.modal.is_some()
    }

    /// Same function without the registered closed form, forcing quadrature.
    pub fn without_modal(&self) -> Self {
        Self { label: self.label.clone(), func: Arc::clone(&self.func), modal: None }
    }
}

impl<T> fmt::Debug for InitialCondition<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialCondition")
            .field("label", &self.label)
            .field("closed_form", &self.modal.is_some())
            .finish()
    }
}

/// Pointwise scalar map used by Nemytskii evaluation: `(x, v(x)) -> value`.
pub type PointMap<'a, T> = &'a (dyn Fn(T, T) -> Result<T> + Sync);

/// Operations shared by the spectral and finite element spaces.
pub trait Discretization<T: Scalar>: Send + Sync {
    fn id(&self) -> SpaceId;

    fn kind(&self) -> SpaceKind;

    fn dim(&self) -> usize;

    fn zeros(&self) -> GridFunction<T> {
        GridFunction::from_raw(vec![T::zero(); self.dim()], self.id())
    }

    /// Wraps a coefficient vector, checking length and finiteness.
    fn grid_function(&self, coeffs: Vec<T>) -> Result<GridFunction<T>> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: coeffs.len() });
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite { context: "building a grid function".into(), value: bad.as_f64() });
        }
        Ok(GridFunction::from_raw(coeffs, self.id()))
    }

    fn check_bound(&self, v: &GridFunction<T>) -> Result<()> {
        if v.space_id() != self.id() {
            return Err(Error::SpaceMismatch { expected: self.id().get(), found: v.space_id().get() });
        }
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        Ok(())
    }

    /// L² orthogonal projection `P_h u0`.
    fn project_initial(&self, u0: &InitialCondition<T>) -> Result<GridFunction<T>>;

    /// Discrete generator `A_h v`.
    fn apply_ah(&self, v: &GridFunction<T>) -> Result<GridFunction<T>>;

    /// `(Id + kappa A_h)^{-1} v`, `kappa > 0`.
    fn resolvent_solve(&self, kappa: T, v: &GridFunction<T>) -> Result<GridFunction<T>>;

    /// Discrete L² norm used for error reporting.
    fn norm_l2(&self, v: &GridFunction<T>) -> Result<T>;

    /// Point values of `v` at `nodes`, all strictly inside (0, 1).
    fn evaluate_on_grid(&self, v: &GridFunction<T>, nodes: &[T]) -> Result<Vec<T>>;

    /// Applies a pointwise map to `v` and returns the result in `V_h`.
    fn nemytskii(&self, v: &GridFunction<T>, map: PointMap<'_, T>) -> Result<GridFunction<T>>;

    /// Representation of `sum_j modal[j-1] sqrt(2) sin(j pi x)` in `V_h`.
    fn modal_to_grid(&self, modal: &[T]) -> GridFunction<T>;
}

pub(crate) fn check_bound_kappa<T: Scalar, D: Discretization<T> + ?Sized>(
    space: &D,
    kappa: T,
    v: &GridFunction<T>,
) -> Result<()> {
    if !(kappa > T::zero()) || !kappa.is_finite() {
        return Err(Error::invalid("kappa", format!("resolvent step must be positive, got {kappa}")));
    }
    space.check_bound(v)
}

pub(crate) fn check_nodes<T: Scalar>(nodes: &[T]) -> Result<()> {
    if let Some(x) = nodes.iter().find(|&&x| !(x > T::zero() && x < T::one())) {
        return Err(Error::invalid("nodes", format!("node {x} is not inside (0, 1)")));
    }
    Ok(())
}

/// Returns `Some(n)` when `nodes` is exactly the interior uniform grid `i / (n + 1)`.
pub(crate) fn uniform_interior_grid<T: Scalar>(nodes: &[T]) -> Option<usize> {
    let n = nodes.len();
    if n == 0 {
        return None;
    }
    let denom = T::of_usize(n + 1);
    let tol = T::epsilon() * T::of(8.0);
    nodes.iter().enumerate().all(|(i, &x)| (x - T::of_usize(i + 1) / denom).abs() <= tol).then_some(n)
}
