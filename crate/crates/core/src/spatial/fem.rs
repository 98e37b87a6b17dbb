use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::dst::DstI;
use super::quadrature;
use super::tridiag::SymTridiagonal;
use super::{
    check_bound_kappa, check_nodes, Discretization, GridFunction, InitialCondition, PointMap, SpaceId,
    SpaceKind,
};

/// Piecewise linear finite elements on the uniform mesh `x_i = i h`,
/// `h = 1 / (N_h + 1)`, with the Dirichlet boundary nodes removed.
///
/// Coefficients are nodal values at the `N_h` interior nodes.
#[derive(Debug, Clone)]
pub struct FemSpace<T: Scalar> {
    id: SpaceId,
    h: T,
    mass: SymTridiagonal<T>,
    stiffness: SymTridiagonal<T>,
    nodes: Vec<T>,
    dst: DstI<T>,
}

impl<T: Scalar> FemSpace<T> {
    pub fn new(n_dof: usize) -> Result<Self> {
        if n_dof == 0 {
            return Err(Error::invalid("n_dof", "finite element space needs an interior node"));
        }
        let h = T::one() / T::of_usize(n_dof + 1);
        let two = T::of(2.0);
        let mass = SymTridiagonal::constant(n_dof, two * h / T::of(3.0), h / T::of(6.0));
        let stiffness = SymTridiagonal::constant(n_dof, two / h, -T::one() / h);
        let nodes = (1..=n_dof).map(|i| T::of_usize(i) * h).collect();
        Ok(Self { id: SpaceId::fresh(), h, mass, stiffness, nodes, dst: DstI::new(n_dof) })
    }

    pub fn n_dof(&self) -> usize {
        self.nodes.len()
    }

    pub fn mesh_width(&self) -> T {
        self.h
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn mass_matrix(&self) -> &SymTridiagonal<T> {
        &self.mass
    }

    pub fn stiffness_matrix(&self) -> &SymTridiagonal<T> {
        &self.stiffness
    }

    /// Load vector `b_i = (u0, phi_i)` by 4-point Gauss–Legendre per element.
    pub fn load_vector(&self, u0: &InitialCondition<T>) -> Vec<T> {
        let n = self.n_dof();
        let h = self.h.as_f64();
        let (xs, ws) = quadrature::gauss_legendre(4);
        let mut b = vec![T::zero(); n];
        // element e spans [e h, (e + 1) h], e = 0..=n
        for e in 0..=n {
            let left = e as f64 * h;
            for (&xi, &wi) in xs.iter().zip(&ws) {
                let s = 0.5 * (xi + 1.0);
                let x = left + s * h;
                let wu = T::of(0.5 * wi * h) * u0.eval(T::of(x));
                if e >= 1 {
                    b[e - 1] = b[e - 1] + wu * T::of(1.0 - s);
                }
                if e < n {
                    b[e] = b[e] + wu * T::of(s);
                }
            }
        }
        b
    }

    /// M-weighted norm `sqrt(v^T M v)`, the exact L² norm of the finite element function.
    pub fn norm_mass(&self, v: &GridFunction<T>) -> Result<T> {
        self.check_bound(v)?;
        Ok(self.mass.quadratic_form(v.coeffs()).sqrt())
    }

    /// Nodal values of `sum_j modal[j-1] sqrt(2) sin(j pi x_i)` by direct summation.
    pub fn modal_to_nodal_direct(&self, modal: &[T]) -> Vec<T> {
        self.nodes
            .iter()
            .map(|&x| {
                modal
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| c * (T::of_usize(j + 1) * T::PI() * x).sin())
                    .sum::<T>()
                    * T::SQRT_2()
            })
            .collect()
    }
}

impl<T: Scalar> Discretization<T> for FemSpace<T> {
    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Fem
    }

    fn dim(&self) -> usize {
        self.nodes.len()
    }

    fn project_initial(&self, u0: &InitialCondition<T>) -> Result<GridFunction<T>> {
        let b = self.load_vector(u0);
        if let Some(bad) = b.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("projecting initial condition `{}`", u0.label()),
                value: bad.as_f64(),
            });
        }
        Ok(GridFunction::from_raw(self.mass.solve(&b)?, self.id))
    }

    fn apply_ah(&self, v: &GridFunction<T>) -> Result<GridFunction<T>> {
        self.check_bound(v)?;
        let sv = self.stiffness.apply(v.coeffs());
        Ok(GridFunction::from_raw(self.mass.solve(&sv)?, self.id))
    }

    fn resolvent_solve(&self, kappa: T, v: &GridFunction<T>) -> Result<GridFunction<T>> {
        check_bound_kappa(self, kappa, v)?;
        let system = self.mass.combine(T::one(), &self.stiffness, kappa);
        let rhs = self.mass.apply(v.coeffs());
        Ok(GridFunction::from_raw(system.solve(&rhs)?, self.id))
    }

    /// Trapezoidal rule with zero boundary values: `sqrt(h sum v_i^2)`.
    fn norm_l2(&self, v: &GridFunction<T>) -> Result<T> {
        self.check_bound(v)?;
        Ok((self.h * v.coeffs().iter().map(|&c| c * c).sum::<T>()).sqrt())
    }

    fn evaluate_on_grid(&self, v: &GridFunction<T>, nodes: &[T]) -> Result<Vec<T>> {
        self.check_bound(v)?;
        check_nodes(nodes)?;
        let n = self.n_dof();
        let scale = T::of_usize(n + 1);
        let value = |i: usize| if i == 0 || i > n { T::zero() } else { v.coeffs()[i - 1] };
        Ok(nodes
            .iter()
            .map(|&x| {
                let s = x * scale;
                let nearest = s.round();
                if (s - nearest).abs() <= T::epsilon() * scale * T::of(4.0) {
                    return value(nearest.to_usize().unwrap_or(0));
                }
                let left = s.floor();
                let i = left.to_usize().unwrap_or(0);
                let w = s - left;
                value(i) * (T::one() - w) + value(i + 1) * w
            })
            .collect())
    }

    fn nemytskii(&self, v: &GridFunction<T>, map: PointMap<'_, T>) -> Result<GridFunction<T>> {
        self.check_bound(v)?;
        let coeffs =
            self.nodes.iter().zip(v.coeffs()).map(|(&x, &vx)| map(x, vx)).collect::<Result<Vec<T>>>()?;
        Ok(GridFunction::from_raw(coeffs, self.id))
    }

    fn modal_to_grid(&self, modal: &[T]) -> GridFunction<T> {
        let coeffs = if modal.len() <= self.n_dof() {
            self.dst.transform(modal).into_iter().map(|s| s * T::SQRT_2()).collect()
        } else {
            self.modal_to_nodal_direct(modal)
        };
        GridFunction::from_raw(coeffs, self.id)
    }
}
