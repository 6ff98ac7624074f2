//! Sparse assembly helpers, dense SPD factorizations and the eigensolver.

mod eigen;

pub use eigen::{
    dense_smallest_eigenpairs, smallest_eigenpairs, EigenOptions, EigenPairs, EigenProblem, DENSE_EIGEN_LIMIT,
};

use crate::error::{Error, Result};
use crate::scalar::Real;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

/// Builds a CSR matrix from triplets, summing duplicates.
pub fn csr_from_triplets<T: Real>(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> CsrMatrix<T> {
    let mut coo = CooMatrix::new(nrows, ncols);
    for &(i, j, v) in triplets {
        coo.push(i, j, v);
    }
    CsrMatrix::from(&coo)
}

/// Converts an integer matrix to floating point.
pub fn csr_cast<T: Real>(m: &CsrMatrix<i64>) -> CsrMatrix<T> {
    let values = m.values().iter().map(|&v| T::lit(v as f64)).collect();
    CsrMatrix::try_from_pattern_and_values(m.pattern().clone(), values).expect("pattern unchanged")
}

/// Extracts the submatrix on the given row and column index lists.
pub fn restrict<T: Real>(m: &CsrMatrix<T>, rows: &[usize], cols: &[usize]) -> CsrMatrix<T> {
    let mut col_pos = vec![usize::MAX; m.ncols()];
    for (k, &c) in cols.iter().enumerate() {
        col_pos[c] = k;
    }
    let mut triplets = Vec::new();
    for (i, &r) in rows.iter().enumerate() {
        let row = m.row(r);
        for (&c, &v) in row.col_indices().iter().zip(row.values()) {
            let j = col_pos[c];
            if j != usize::MAX {
                triplets.push((i, j, v));
            }
        }
    }
    csr_from_triplets(rows.len(), cols.len(), &triplets)
}

/// Transpose of a CSR matrix.
pub fn transpose<T: Real>(m: &CsrMatrix<T>) -> CsrMatrix<T> {
    m.transpose()
}

/// Dense copy.
pub fn to_dense<T: Real>(m: &CsrMatrix<T>) -> DMatrix<T> {
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, j, &v) in m.triplet_iter() {
        d[(i, j)] += v;
    }
    d
}

/// `y = A x`.
pub fn mul_vec<T: Real>(a: &CsrMatrix<T>, x: &DVector<T>) -> DVector<T> {
    debug_assert_eq!(a.ncols(), x.len());
    let mut y = DVector::zeros(a.nrows());
    for (i, row) in a.row_iter().enumerate() {
        let mut s = T::zero();
        for (&c, &v) in row.col_indices().iter().zip(row.values()) {
            s += v * x[c];
        }
        y[i] = s;
    }
    y
}

/// `y = Aᵀ x`.
pub fn mul_tr_vec<T: Real>(a: &CsrMatrix<T>, x: &DVector<T>) -> DVector<T> {
    debug_assert_eq!(a.nrows(), x.len());
    let mut y = DVector::zeros(a.ncols());
    for (i, row) in a.row_iter().enumerate() {
        let xi = x[i];
        for (&c, &v) in row.col_indices().iter().zip(row.values()) {
            y[c] += v * xi;
        }
    }
    y
}

/// `Y = A X` for a dense block `X`.
pub fn mul_mat<T: Real>(a: &CsrMatrix<T>, x: &DMatrix<T>) -> DMatrix<T> {
    debug_assert_eq!(a.ncols(), x.nrows());
    let mut y = DMatrix::zeros(a.nrows(), x.ncols());
    for (i, row) in a.row_iter().enumerate() {
        for (&c, &v) in row.col_indices().iter().zip(row.values()) {
            for k in 0..x.ncols() {
                y[(i, k)] += v * x[(c, k)];
            }
        }
    }
    y
}

/// `Y = Aᵀ X` for a dense block `X`.
pub fn mul_tr_mat<T: Real>(a: &CsrMatrix<T>, x: &DMatrix<T>) -> DMatrix<T> {
    debug_assert_eq!(a.nrows(), x.nrows());
    let mut y = DMatrix::zeros(a.ncols(), x.ncols());
    for (i, row) in a.row_iter().enumerate() {
        for (&c, &v) in row.col_indices().iter().zip(row.values()) {
            for k in 0..x.ncols() {
                y[(c, k)] += v * x[(i, k)];
            }
        }
    }
    y
}

/// `xᵀ A y`.
pub fn bilinear<T: Real>(a: &CsrMatrix<T>, x: &DVector<T>, y: &DVector<T>) -> T {
    let mut s = T::zero();
    for (i, row) in a.row_iter().enumerate() {
        let mut r = T::zero();
        for (&c, &v) in row.col_indices().iter().zip(row.values()) {
            r += v * y[c];
        }
        s += x[i] * r;
    }
    s
}

/// `Aᵀ B A` for sparse matrices.
pub fn triple_product<T: Real>(a: &CsrMatrix<T>, b: &CsrMatrix<T>) -> CsrMatrix<T> {
    let ba = b * a;
    &a.transpose() * &ba
}

/// Cholesky factor of a dense SPD matrix; the empty matrix is allowed.
#[derive(Clone, Debug)]
pub struct SpdFactor<T: Real> {
    n: usize,
    chol: Option<Cholesky<T, Dyn>>,
}

impl<T: Real> SpdFactor<T> {
    /// Factors `a`; `what` names the operator in error messages.
    pub fn new(a: DMatrix<T>, what: &str) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Ok(Self { n, chol: None });
        }
        let chol = Cholesky::new(a).ok_or_else(|| Error::NotPositiveDefinite(what.to_string()))?;
        Ok(Self { n, chol: Some(chol) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &DVector<T>) -> DVector<T> {
        match &self.chol {
            Some(c) => c.solve(b),
            None => DVector::zeros(0),
        }
    }

    pub fn solve_mat(&self, b: &DMatrix<T>) -> DMatrix<T> {
        match &self.chol {
            Some(c) => c.solve(b),
            None => DMatrix::zeros(0, b.ncols()),
        }
    }

    /// Smallest diagonal entry of the Cholesky factor, squared.
    pub fn min_pivot(&self) -> T {
        match &self.chol {
            Some(c) => {
                let l = c.l_dirty();
                (0..self.n)
                    .map(|i| l[(i, i)] * l[(i, i)])
                    .fold(T::max_value().unwrap(), |a, b| a.min(b))
            }
            None => T::zero(),
        }
    }
}

/// Oblique projector removing the span of `basis` orthogonally in the
/// inner product `G`: `x ↦ x − Q (QᵀGQ)⁻¹ QᵀG x`.
#[derive(Clone, Debug)]
pub struct GramProjector<T: Real> {
    basis: DMatrix<T>,
    weighted: DMatrix<T>,
    gram_inv: DMatrix<T>,
}

impl<T: Real> GramProjector<T> {
    /// `weighted` must equal `G · basis`.
    pub fn new(basis: DMatrix<T>, weighted: DMatrix<T>) -> Result<Self> {
        let gram = basis.transpose() * &weighted;
        let k = gram.nrows();
        let gram_inv = if k == 0 {
            gram
        } else {
            let sym = (&gram + gram.transpose()) * T::lit(0.5);
            Cholesky::new(sym)
                .ok_or_else(|| Error::NotPositiveDefinite("projector Gram matrix".into()))?
                .inverse()
        };
        Ok(Self {
            basis,
            weighted,
            gram_inv,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn weighted(&self) -> &DMatrix<T> {
        &self.weighted
    }

    /// Coefficients of the projection onto the span.
    pub fn coefficients(&self, x: &DMatrix<T>) -> DMatrix<T> {
        &self.gram_inv * (self.weighted.transpose() * x)
    }

    /// `G Q (QᵀGQ)⁻¹ QᵀG`: a penalty that is zero on the `G`-orthogonal
    /// complement of the span.
    pub fn gauge(&self) -> DMatrix<T> {
        &self.weighted * &self.gram_inv * self.weighted.transpose()
    }

    pub fn apply(&self, x: &mut DMatrix<T>) {
        if self.rank() == 0 {
            return;
        }
        let c = self.coefficients(x);
        *x -= &self.basis * c;
    }

    pub fn apply_vec(&self, x: &mut DVector<T>) {
        if self.rank() == 0 {
            return;
        }
        let c = &self.gram_inv * (self.weighted.transpose() * &*x);
        *x -= &self.basis * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restrict_picks_entries() {
        let m = csr_from_triplets::<f64>(3, 3, &[(0, 0, 1.0), (1, 2, 2.0), (2, 1, 3.0), (1, 2, 1.0)]);
        let r = restrict(&m, &[1, 2], &[1, 2]);
        let d = to_dense(&r);
        assert_eq!(d, DMatrix::from_row_slice(2, 2, &[0.0, 3.0, 3.0, 0.0]));
    }

    #[test]
    fn sparse_products_match_dense() {
        let m = csr_from_triplets::<f64>(2, 3, &[(0, 0, 1.0), (0, 2, -2.0), (1, 1, 4.0)]);
        let d = to_dense(&m);
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let y = DVector::from_vec(vec![-1.0, 0.5]);
        assert_eq!(mul_vec(&m, &x), &d * &x);
        assert_eq!(mul_tr_vec(&m, &y), d.transpose() * &y);
        let b = csr_from_triplets::<f64>(2, 2, &[(0, 0, 2.0), (1, 1, 3.0), (0, 1, 1.0), (1, 0, 1.0)]);
        let t = to_dense(&triple_product(&m, &b));
        let want = d.transpose() * to_dense(&b) * &d;
        assert!((t - want).norm() < 1e-14);
    }

    #[test]
    fn projector_is_idempotent() {
        let basis = DMatrix::<f64>::from_column_slice(3, 1, &[1.0, 1.0, 0.0]);
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let p = GramProjector::new(basis.clone(), &g * &basis).unwrap();
        let mut x = DMatrix::from_column_slice(3, 1, &[0.3, -1.0, 2.0]);
        p.apply(&mut x);
        assert!((basis.transpose() * &g * &x)[(0, 0)].abs() < 1e-14);
        let before = x.clone();
        p.apply(&mut x);
        assert!((x - before).norm() < 1e-14);
    }
}
