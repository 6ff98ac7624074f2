use crate::error::{Error, Result};
use crate::forms::{evaluate_proxy, Cochain};
use crate::linalg::mul_vec;
use crate::mesh::SimplicialComplex;
use crate::scalar::Real;
use nalgebra::DVector;

/// Matrix field whose N rows are Whitney 1-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField<T: Real> {
    rows: Vec<Cochain<T>>,
}

/// Basis `E_ij = e_i ⊗ e_j − e_j ⊗ e_i` (`i < j`) of skew matrices, row-major.
pub fn skew_basis<T: Real>(n: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut m = vec![T::zero(); n * n];
            m[i * n + j] = T::one();
            m[j * n + i] = -T::one();
            out.push(m);
        }
    }
    out
}

impl<T: Real> TensorField<T> {
    pub fn new(complex: &SimplicialComplex<T>, rows: Vec<Cochain<T>>) -> Result<Self> {
        if rows.len() != complex.dim() {
            return Err(Error::LengthMismatch {
                expected: complex.dim(),
                found: rows.len(),
            });
        }
        for r in &rows {
            r.check_on(complex)?;
            if r.degree() != 1 {
                return Err(Error::DegreeMismatch {
                    expected: 1,
                    found: r.degree(),
                });
            }
        }
        Ok(Self { rows })
    }

    /// Field from stacked row values (`row * n_edges + edge`).
    pub fn from_stacked(complex: &SimplicialComplex<T>, v: &DVector<T>) -> Result<Self> {
        let ne = complex.count(1);
        let n = complex.dim();
        if v.len() != n * ne {
            return Err(Error::LengthMismatch {
                expected: n * ne,
                found: v.len(),
            });
        }
        let rows = (0..n)
            .map(|a| Cochain::raw(complex.id(), 1, v.rows(a * ne, ne).into_owned()))
            .collect();
        Ok(Self { rows })
    }

    /// Constant matrix field `S` (row-major); Whitney forms reproduce it exactly.
    pub fn constant(complex: &SimplicialComplex<T>, s: &[T]) -> Self {
        let n = complex.dim();
        let rows = (0..n)
            .map(|a| {
                let vals = complex
                    .simplices(1)
                    .iter()
                    .map(|e| {
                        let (p, q) = (complex.vertex(e[0]), complex.vertex(e[1]));
                        (0..n).fold(T::zero(), |acc, k| acc + s[a * n + k] * (q[k] - p[k]))
                    })
                    .collect::<Vec<_>>();
                Cochain::raw(complex.id(), 1, DVector::from_vec(vals))
            })
            .collect();
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Cochain<T>] {
        &self.rows
    }

    pub fn row(&self, a: usize) -> &Cochain<T> {
        &self.rows[a]
    }

    pub fn complex_id(&self) -> u64 {
        self.rows[0].complex_id()
    }

    pub fn stacked(&self) -> DVector<T> {
        let ne = self.rows[0].values().len();
        let mut v = DVector::zeros(ne * self.rows.len());
        for (a, r) in self.rows.iter().enumerate() {
            v.rows_mut(a * ne, ne).copy_from(r.values());
        }
        v
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    /// Matrix value (row-major) at a barycentric point of a cell.
    pub fn value_at(&self, complex: &SimplicialComplex<T>, cell: usize, bary: &[T]) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(self.dim() * self.dim());
        for r in &self.rows {
            out.extend(evaluate_proxy(complex, r, cell, bary)?);
        }
        Ok(out)
    }
}

/// `Grad v` for a vector field with P1 components (one 0-cochain each).
pub fn grad_vector_field<T: Real>(complex: &SimplicialComplex<T>, v: &[Cochain<T>]) -> Result<TensorField<T>> {
    let d0 = complex.incidence_real(0);
    let rows = v
        .iter()
        .map(|c| {
            c.check_on(complex)?;
            if c.degree() != 0 {
                return Err(Error::DegreeMismatch {
                    expected: 0,
                    found: c.degree(),
                });
            }
            Ok(Cochain::raw(complex.id(), 1, mul_vec(&d0, c.values())))
        })
        .collect::<Result<Vec<_>>>()?;
    TensorField::new(complex, rows)
}

/// Row-wise `Curl`: the coboundary of every row (2-cochains). Proxies follow
/// the 2-form convention of [`evaluate_proxy`].
pub fn row_curl<T: Real>(complex: &SimplicialComplex<T>, t: &TensorField<T>) -> Result<Vec<Cochain<T>>> {
    let d1 = complex.incidence_real(1);
    t.rows()
        .iter()
        .map(|r| {
            r.check_on(complex)?;
            Ok(Cochain::raw(complex.id(), 2, mul_vec(&d1, r.values())))
        })
        .collect()
}
