use crate::error::{Error, Result};
use crate::mesh::SimplicialComplex;
use crate::scalar::Real;
use nalgebra::DVector;

/// Discrete q-form: one value per q-simplex (the integral of the form over it).
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<T: Real> {
    complex_id: u64,
    degree: usize,
    values: DVector<T>,
}

impl<T: Real> Cochain<T> {
    pub fn new(complex: &SimplicialComplex<T>, degree: usize, values: DVector<T>) -> Result<Self> {
        complex.check_degree(degree)?;
        let n = complex.count(degree);
        if values.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: values.len(),
            });
        }
        Ok(Self {
            complex_id: complex.id(),
            degree,
            values,
        })
    }

    pub fn from_vec(complex: &SimplicialComplex<T>, degree: usize, values: Vec<T>) -> Result<Self> {
        Self::new(complex, degree, DVector::from_vec(values))
    }

    pub fn zeros(complex: &SimplicialComplex<T>, degree: usize) -> Result<Self> {
        complex.check_degree(degree)?;
        Ok(Self {
            complex_id: complex.id(),
            degree,
            values: DVector::zeros(complex.count(degree)),
        })
    }

    /// Values are trusted to match the complex.
    pub(crate) fn raw(complex_id: u64, degree: usize, values: DVector<T>) -> Self {
        Self {
            complex_id,
            degree,
            values,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn complex_id(&self) -> u64 {
        self.complex_id
    }

    pub fn values(&self) -> &DVector<T> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut DVector<T> {
        &mut self.values
    }

    pub fn into_values(self) -> DVector<T> {
        self.values
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.complex_id != other.complex_id {
            return Err(Error::ComplexMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub fn check_on(&self, complex: &SimplicialComplex<T>) -> Result<()> {
        if self.complex_id == complex.id() {
            Ok(())
        } else {
            Err(Error::ComplexMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::raw(self.complex_id, self.degree, &self.values + &other.values))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::raw(self.complex_id, self.degree, &self.values - &other.values))
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::raw(self.complex_id, self.degree, &self.values * s)
    }
}
