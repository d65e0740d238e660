//! The unperturbed diagonal operator and its perturbation.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::scalar::{is_finite, Real, C};

/// Diagonal entries `λ_1..λ_N` of the unperturbed matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSpectrum<T> {
    values: Vec<C<T>>,
}

impl<T: Real> DiagonalSpectrum<T> {
    pub fn new(values: Vec<C<T>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("spectrum must have at least one entry".into()));
        }
        if let Some(i) = values.iter().position(|&z| !is_finite(z)) {
            return Err(Error::Domain(format!("spectrum entry {i} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C::new(T::lit(x), T::zero())).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn get(&self, i: usize) -> Option<C<T>> {
        self.values.get(i).copied()
    }

    /// Eigenvalues along an index path, or a dimension error for out-of-range indices.
    pub fn nodes_along(&self, path: &[usize]) -> Result<Vec<C<T>>> {
        path.iter()
            .map(|&i| {
                self.get(i).ok_or_else(|| {
                    Error::Dimension(format!("path index {i} out of range for N = {}", self.len()))
                })
            })
            .collect()
    }

    pub fn mean(&self) -> C<T> {
        let sum = self.values.iter().fold(C::new(T::zero(), T::zero()), |a, &b| a + b);
        sum / T::from_usize_lossy(self.len())
    }

    pub fn to_matrix(&self) -> CMatrix<T> {
        CMatrix::from_diagonal(&self.values)
    }

    /// Index of the first exactly-zero entry, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.values
            .iter()
            .position(|z| z.re == T::zero() && z.im == T::zero())
    }
}

/// Dense square perturbation `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationMatrix<T>(CMatrix<T>);

impl<T: Real> PerturbationMatrix<T> {
    pub fn new(entries: CMatrix<T>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Dimension(format!(
                "perturbation must be square, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        if !entries.is_finite() {
            return Err(Error::Domain("perturbation has non-finite entries".into()));
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.0
    }

    pub fn scaled(&self, s: T) -> Self {
        Self(self.0.scale(C::new(s, T::zero())))
    }

    pub fn check_against(&self, lambda: &DiagonalSpectrum<T>) -> Result<()> {
        if self.dim() != lambda.len() {
            return Err(Error::Dimension(format!(
                "spectrum has {} entries but perturbation is {}x{}",
                lambda.len(),
                self.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

impl<T> Deref for PerturbationMatrix<T> {
    type Target = CMatrix<T>;
    fn deref(&self) -> &CMatrix<T> {
        &self.0
    }
}

/// `λ + τ` as a dense matrix.
pub fn perturbed_matrix<T: Real>(
    lambda: &DiagonalSpectrum<T>,
    tau: &PerturbationMatrix<T>,
) -> Result<CMatrix<T>> {
    tau.check_against(lambda)?;
    Ok(&lambda.to_matrix() + tau.matrix())
}
