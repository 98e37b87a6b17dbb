//! Symmetric tridiagonal matrices and the Thomas solver.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<T> {
    diag: Vec<T>,
    off: Vec<T>,
}

impl<T: Scalar> SymTridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Self {
        assert!(!diag.is_empty(), "empty tridiagonal matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length must be n - 1");
        Self { diag, off }
    }

    /// Toeplitz matrix with constant diagonal `d` and off-diagonal `e`.
    pub fn constant(n: usize, d: T, e: T) -> Self {
        Self::new(vec![d; n], vec![e; n.saturating_sub(1)])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn off(&self) -> &[T] {
        &self.off
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        assert_eq!(self.dim(), other.dim());
        let diag = self.diag.iter().zip(&other.diag).map(|(&x, &y)| a * x + b * y).collect();
        let off = self.off.iter().zip(&other.off).map(|(&x, &y)| a * x + b * y).collect();
        Self { diag, off }
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s = s + self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s = s + self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn quadratic_form(&self, v: &[T]) -> T {
        self.apply(v).iter().zip(v).map(|(&a, &b)| a * b).sum()
    }

    /// Thomas algorithm without pivoting; valid for the SPD systems used here.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        assert_eq!(rhs.len(), n);
        let mut c = vec![T::zero(); n];
        let mut x = vec![T::zero(); n];
        let mut denom = self.diag[0];
        if denom == T::zero() {
            return Err(Error::invalid("matrix", "zero pivot in tridiagonal solve"));
        }
        if n > 1 {
            c[0] = self.off[0] / denom;
        }
        x[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            if denom == T::zero() {
                return Err(Error::invalid("matrix", "zero pivot in tridiagonal solve"));
            }
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            x[i] = (rhs[i] - self.off[i - 1] * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] = x[i] - c[i] * x[i + 1];
        }
        Ok(x)
    }
}
