use crate::error::{Error, Result};
use crate::mesh::SimplicialComplex;
use crate::quadrature::SimplexRule;
use crate::scalar::Real;

/// Piecewise-linear matrix field given by its vertex values (row-major
/// `N × N` per vertex).
#[derive(Clone, Debug)]
pub struct MaterialField<T: Real> {
    dim: usize,
    values: Vec<T>,
}

impl<T: Real> MaterialField<T> {
    pub fn new(complex: &SimplicialComplex<T>, values: Vec<T>) -> Result<Self> {
        let n = complex.dim();
        let want = complex.n_vertices() * n * n;
        if values.len() != want {
            return Err(Error::LengthMismatch {
                expected: want,
                found: values.len(),
            });
        }
        Ok(Self { dim: n, values })
    }

    /// Identity at every vertex.
    pub fn identity(complex: &SimplicialComplex<T>) -> Self {
        let n = complex.dim();
        let mut values = Vec::with_capacity(complex.n_vertices() * n * n);
        for _ in 0..complex.n_vertices() {
            for i in 0..n {
                for j in 0..n {
                    values.push(if i == j { T::one() } else { T::zero() });
                }
            }
        }
        Self { dim: n, values }
    }

    /// Samples `f(x)` at every vertex.
    pub fn from_fn(complex: &SimplicialComplex<T>, f: impl Fn(&[T]) -> Vec<T>) -> Result<Self> {
        let values = (0..complex.n_vertices()).flat_map(|v| f(complex.vertex(v))).collect();
        Self::new(complex, values)
    }

    pub fn vertex_value(&self, v: usize) -> &[T] {
        let w = self.dim * self.dim;
        &self.values[v * w..(v + 1) * w]
    }

    /// Value at a barycentric point of a cell, written as
    /// `μ₀ + Σ_{i≥1} λ_i (μ_i − μ₀)` so that a constant field is reproduced exactly.
    pub fn at(&self, complex: &SimplicialComplex<T>, c: usize, bary: &[T]) -> Vec<T> {
        let cell = complex.cell(c);
        let base = self.vertex_value(cell[0]);
        let mut out = base.to_vec();
        for (k, &v) in cell.iter().enumerate().skip(1) {
            let mv = self.vertex_value(v);
            for (o, (&x, &b)) in out.iter_mut().zip(mv.iter().zip(base)) {
                let diff = x - b;
                if diff != T::zero() {
                    *o += bary[k] * diff;
                }
            }
        }
        out
    }

    /// Smallest determinant over all quadrature points; errors if it is
    /// not positive.
    pub fn min_determinant(&self, complex: &SimplicialComplex<T>) -> Result<T> {
        let n = self.dim;
        let rule = SimplexRule::<T>::of_degree(n, super::forms::TENSOR_QUADRATURE_DEGREE);
        let mut best: Option<(T, usize)> = None;
        for c in 0..complex.n_cells() {
            let mut pts: Vec<Vec<T>> = rule.points.clone();
            for k in 0..=n {
                let mut p = vec![T::zero(); n + 1];
                p[k] = T::one();
                pts.push(p);
            }
            for p in &pts {
                let m = self.at(complex, c, p);
                let d = crate::forms::det(&m, n);
                if best.is_none_or(|(b, _)| d < b) {
                    best = Some((d, c));
                }
            }
        }
        let (d, c) = best.expect("nonempty mesh");
        if d <= T::zero() {
            return Err(Error::MaterialNotPositive {
                cell: c,
                det: d.as_f64(),
            });
        }
        Ok(d)
    }
}
