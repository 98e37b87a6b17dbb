use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::dst::DstI;
use super::quadrature;
use super::{
    check_bound_kappa, check_nodes, uniform_interior_grid, Discretization, GridFunction, InitialCondition,
    PointMap, SpaceId, SpaceKind,
};

/// Galerkin space `span{e_1, ..., e_N}` with `e_j = sqrt(2) sin(j pi x)`.
///
/// The generator is diagonal with eigenvalues `lambda_j = j^2 pi^2`, so the
/// resolvent and `A_h` act coefficient-wise. Pointwise nonlinearities are
/// evaluated by collocation on a uniform grid of `max(2N, 64)` interior
/// nodes.
#[derive(Debug, Clone)]
pub struct SpectralSpace<T: Scalar> {
    id: SpaceId,
    eigenvalues: Vec<T>,
    collocation: DstI<T>,
}

impl<T: Scalar> SpectralSpace<T> {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::invalid("n_modes", "spectral space needs at least one mode"));
        }
        let eigenvalues = (1..=n_modes)
            .map(|j| {
                let jp = T::of_usize(j) * T::PI();
                jp * jp
            })
            .collect();
        Ok(Self { id: SpaceId::fresh(), eigenvalues, collocation: DstI::new((2 * n_modes).max(64)) })
    }

    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Number of interior collocation nodes used for Nemytskii maps.
    pub fn collocation_points(&self) -> usize {
        self.collocation.len()
    }

    /// Modal coefficients to point values on the uniform grid `i / (L + 1)`.
    fn synthesize(&self, dst: &DstI<T>, coeffs: &[T]) -> Vec<T> {
        let take = coeffs.len().min(dst.len());
        dst.transform(&coeffs[..take]).into_iter().map(|s| s * T::SQRT_2()).collect()
    }
}

impl<T: Scalar> Discretization<T> for SpectralSpace<T> {
    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Spectral
    }

    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn project_initial(&self, u0: &InitialCondition<T>) -> Result<GridFunction<T>> {
        let n = self.n_modes();
        let coeffs: Vec<T> = if u0.has_modal() {
            (1..=n).map(|j| u0.modal_coefficient(j).unwrap()).collect()
        } else {
            let rule = quadrature::composite(0.0, 1.0, (2 * n).max(256), 8);
            let samples: Vec<(f64, T)> =
                rule.iter().map(|&(x, w)| (x, T::of(w) * u0.eval(T::of(x)))).collect();
            (1..=n)
                .map(|j| {
                    let jf = j as f64;
                    samples
                        .iter()
                        .map(|&(x, wu)| wu * T::of((jf * std::f64::consts::PI * x).sin()))
                        .sum::<T>()
                        * T::SQRT_2()
                })
                .collect()
        };
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("projecting initial condition `{}`", u0.label()),
                value: bad.as_f64(),
            });
        }
        Ok(GridFunction::from_raw(coeffs, self.id))
    }

    fn apply_ah(&self, v: &GridFunction<T>) -> Result<GridFunction<T>> {
        self.check_bound(v)?;
        let coeffs = v.coeffs().iter().zip(&self.eigenvalues).map(|(&c, &l)| c * l).collect();
        Ok(GridFunction::from_raw(coeffs, self.id))
    }

    fn resolvent_solve(&self, kappa: T, v: &GridFunction<T>) -> Result<GridFunction<T>> {
        check_bound_kappa(self, kappa, v)?;
        let coeffs =
            v.coeffs().iter().zip(&self.eigenvalues).map(|(&c, &l)| c / (T::one() + kappa * l)).collect();
        Ok(GridFunction::from_raw(coeffs, self.id))
    }

    fn norm_l2(&self, v: &GridFunction<T>) -> Result<T> {
        self.check_bound(v)?;
        Ok(v.coeffs().iter().map(|&c| c * c).sum::<T>().sqrt())
    }

    fn evaluate_on_grid(&self, v: &GridFunction<T>, nodes: &[T]) -> Result<Vec<T>> {
        self.check_bound(v)?;
        check_nodes(nodes)?;
        if let Some(len) = uniform_interior_grid(nodes) {
            if len >= self.n_modes() {
                return Ok(self.synthesize(&DstI::new(len), v.coeffs()));
            }
        }
        Ok(nodes
            .iter()
            .map(|&x| {
                v.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| c * (T::of_usize(j + 1) * T::PI() * x).sin())
                    .sum::<T>()
                    * T::SQRT_2()
            })
            .collect())
    }

    fn nemytskii(&self, v: &GridFunction<T>, map: PointMap<'_, T>) -> Result<GridFunction<T>> {
        self.check_bound(v)?;
        let q = self.collocation.len();
        let denom = T::of_usize(q + 1);
        let nodal = self.synthesize(&self.collocation, v.coeffs());
        let mapped = nodal
            .iter()
            .enumerate()
            .map(|(i, &vx)| map(T::of_usize(i + 1) / denom, vx))
            .collect::<Result<Vec<T>>>()?;
        let scale = T::SQRT_2() / denom;
        let mut coeffs = self.collocation.transform(&mapped);
        coeffs.truncate(self.n_modes());
        for c in &mut coeffs {
            *c = *c * scale;
        }
        Ok(GridFunction::from_raw(coeffs, self.id))
    }

    fn modal_to_grid(&self, modal: &[T]) -> GridFunction<T> {
        let mut coeffs = vec![T::zero(); self.n_modes()];
        for (c, &m) in coeffs.iter_mut().zip(modal) {
            *c = m;
        }
        GridFunction::from_raw(coeffs, self.id)
    }
}
