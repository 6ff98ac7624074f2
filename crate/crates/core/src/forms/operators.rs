use super::cochain::Cochain;
use super::whitney::local_mass;
use crate::error::{Error, Result};
use crate::linalg::{csr_from_triplets, mul_vec, to_dense, SpdFactor};
use crate::mesh::SimplicialComplex;
use crate::scalar::Real;
use nalgebra_sparse::CsrMatrix;
use std::sync::OnceLock;

/// Linear map between cochain spaces.
#[derive(Clone, Debug)]
pub struct FormOperator<T: Real> {
    pub from_degree: usize,
    pub to_degree: usize,
    pub matrix: CsrMatrix<T>,
}

impl<T: Real> FormOperator<T> {
    pub fn apply(&self, u: &Cochain<T>) -> Result<Cochain<T>> {
        if u.degree() != self.from_degree {
            return Err(Error::DegreeMismatch {
                expected: self.from_degree,
                found: u.degree(),
            });
        }
        Ok(Cochain::raw(
            u.complex_id(),
            self.to_degree,
            mul_vec(&self.matrix, u.values()),
        ))
    }
}

/// Coboundary `d_q : C^q → C^{q+1}`.
pub fn coboundary<T: Real>(complex: &SimplicialComplex<T>, q: usize) -> Result<FormOperator<T>> {
    complex.check_degree(q)?;
    if q == complex.dim() {
        return Err(Error::DegreeOutOfRange {
            degree: q + 1,
            dim: complex.dim(),
        });
    }
    Ok(FormOperator {
        from_degree: q,
        to_degree: q + 1,
        matrix: complex.incidence_real(q),
    })
}

/// Whitney mass matrix of degree `q`.
pub fn mass_matrix<T: Real>(complex: &SimplicialComplex<T>, q: usize) -> Result<CsrMatrix<T>> {
    complex.check_degree(q)?;
    let n = complex.count(q);
    let mut triplets = Vec::new();
    for c in 0..complex.n_cells() {
        let faces = complex.cell_faces(c, q);
        let loc = local_mass(complex, c, q);
        let m = faces.len();
        for (i, &fi) in faces.iter().enumerate() {
            for (j, &fj) in faces.iter().enumerate() {
                triplets.push((fi, fj, loc[i * m + j]));
            }
        }
    }
    Ok(csr_from_triplets(n, n, &triplets))
}

/// Coboundaries and mass matrices of every degree, with lazily factored
/// full-space masses.
pub struct FormSystem<'a, T: Real> {
    complex: &'a SimplicialComplex<T>,
    d: Vec<CsrMatrix<T>>,
    mass: Vec<CsrMatrix<T>>,
    mass_factor: Vec<OnceLock<SpdFactor<T>>>,
}

impl<'a, T: Real> FormSystem<'a, T> {
    pub fn new(complex: &'a SimplicialComplex<T>) -> Result<Self> {
        let n = complex.dim();
        let d = (0..n).map(|q| complex.incidence_real(q)).collect();
        let mass = (0..=n).map(|q| mass_matrix(complex, q)).collect::<Result<_>>()?;
        Ok(Self {
            complex,
            d,
            mass,
            mass_factor: (0..=n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn complex(&self) -> &'a SimplicialComplex<T> {
        self.complex
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    /// Coboundary matrix out of degree `q` (`q < N`).
    pub fn d(&self, q: usize) -> &CsrMatrix<T> {
        &self.d[q]
    }

    pub fn mass(&self, q: usize) -> &CsrMatrix<T> {
        &self.mass[q]
    }

    pub fn mass_factor(&self, q: usize) -> Result<&SpdFactor<T>> {
        if let Some(f) = self.mass_factor[q].get() {
            return Ok(f);
        }
        let f = SpdFactor::new(to_dense(&self.mass[q]), "Whitney mass matrix")?;
        Ok(self.mass_factor[q].get_or_init(|| f))
    }

    pub fn check(&self, u: &Cochain<T>) -> Result<()> {
        u.check_on(self.complex)
    }

    /// `d u`.
    pub fn apply_d(&self, u: &Cochain<T>) -> Result<Cochain<T>> {
        self.check(u)?;
        if u.degree() >= self.dim() {
            return Err(Error::DegreeOutOfRange {
                degree: u.degree() + 1,
                dim: self.dim(),
            });
        }
        Ok(Cochain::raw(
            u.complex_id(),
            u.degree() + 1,
            mul_vec(&self.d[u.degree()], u.values()),
        ))
    }
}
