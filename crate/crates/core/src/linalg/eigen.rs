use crate::error::{Error, Result};
use crate::scalar::Real;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type BlockOp<'a, T> = &'a (dyn Fn(&DMatrix<T>) -> DMatrix<T> + Sync);

/// Generalized symmetric pencil `A x = λ B x` accessed through block
/// operators. `apply_inv` applies the inverse of an SPD operator that
/// agrees with `A − σB` on the subspace of interest; `project` keeps the
/// iterates inside that subspace.
pub struct EigenProblem<'a, T: Real> {
    pub n: usize,
    pub apply_a: BlockOp<'a, T>,
    pub apply_b: BlockOp<'a, T>,
    pub apply_inv: BlockOp<'a, T>,
    pub project: Option<&'a (dyn Fn(&mut DMatrix<T>) + Sync)>,
}

#[derive(Clone, Debug)]
pub struct EigenOptions {
    /// Number of wanted eigenpairs (smallest first).
    pub count: usize,
    /// Block size; at least `count`.
    pub block: usize,
    pub max_iter: usize,
    /// Relative residual tolerance.
    pub tol: f64,
    /// Absolute eigenvalue scale added to the residual test; needed when
    /// wanted eigenvalues are (near) zero.
    pub abs_scale: f64,
    pub seed: u64,
}

impl EigenOptions {
    pub fn new(count: usize) -> Self {
        Self {
            count,
            block: count + 6,
            max_iter: 600,
            tol: 1e-10,
            abs_scale: 0.0,
            seed: 0x6b6d_6c00,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPairs<T: Real> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// `B`-orthonormal eigenvectors, one per column.
    pub vectors: DMatrix<T>,
    /// `‖A x − λ B x‖ / ‖x‖` per pair.
    pub residuals: Vec<T>,
    pub iterations: usize,
}

fn random_block<T: Real>(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DMatrix<T> {
    DMatrix::from_fn(n, k, |_, _| {
        let v: f64 = StandardNormal.sample(rng);
        T::lit(v)
    })
}

/// Rayleigh–Ritz on the span of `y`; returns ascending Ritz values and
/// `B`-orthonormal Ritz vectors. Numerically dependent directions are dropped.
fn rayleigh_ritz<T: Real>(p: &EigenProblem<'_, T>, y: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let by = (p.apply_b)(y);
    let g = y.transpose() * &by;
    let g = (&g + g.transpose()) * T::lit(0.5);
    let eg = SymmetricEigen::new(g);
    let gmax = eg.eigenvalues.iter().fold(T::zero(), |a, &b| a.max(b));
    let cut = gmax * T::lit(1e-13);
    let keep: Vec<usize> = (0..eg.eigenvalues.len())
        .filter(|&i| eg.eigenvalues[i] > cut && eg.eigenvalues[i] > T::zero())
        .collect();
    let mut basis = DMatrix::zeros(y.ncols(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        let s = T::one() / eg.eigenvalues[i].sqrt();
        basis.set_column(c, &(eg.eigenvectors.column(i) * s));
    }
    let q = y * basis;
    let aq = (p.apply_a)(&q);
    let h = q.transpose() * aq;
    let h = (&h + h.transpose()) * T::lit(0.5);
    let eh = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eh.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eh.eigenvalues[a].partial_cmp(&eh.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&i| eh.eigenvalues[i]).collect();
    let mut w = DMatrix::zeros(eh.eigenvalues.len(), order.len());
    for (c, &i) in order.iter().enumerate() {
        w.set_column(c, &eh.eigenvectors.column(i));
    }
    (values, q * w)
}

/// Smallest eigenpairs by shift-invert block subspace iteration with
/// Rayleigh–Ritz extraction.
pub fn smallest_eigenpairs<T: Real>(p: &EigenProblem<'_, T>, opts: &EigenOptions) -> Result<EigenPairs<T>> {
    let n = p.n;
    let count = opts.count.min(n);
    if count == 0 {
        return Ok(EigenPairs {
            values: vec![],
            vectors: DMatrix::zeros(n, 0),
            residuals: vec![],
            iterations: 0,
        });
    }
    let block = opts.block.max(count).min(n);
    let tol = T::lit(opts.tol);
    let abs_scale = T::lit(opts.abs_scale);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = random_block::<T>(&mut rng, n, block);
    if let Some(proj) = p.project {
        proj(&mut x);
    }
    let mut worst = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let bx = (p.apply_b)(&x);
        let mut y = (p.apply_inv)(&bx);
        if let Some(proj) = p.project {
            proj(&mut y);
        }
        let (values, vecs) = rayleigh_ritz(p, &y);
        let kept = values.len();
        if kept >= count {
            let head = vecs.columns(0, count).into_owned();
            let ax = (p.apply_a)(&head);
            let bxh = (p.apply_b)(&head);
            let mut residuals = Vec::with_capacity(count);
            let mut ok = true;
            worst = 0.0;
            for i in 0..count {
                let lam = values[i];
                let r = ax.column(i) - bxh.column(i) * lam;
                let scale = ax.column(i).norm() + (lam.abs() + abs_scale) * bxh.column(i).norm();
                let rn = r.norm();
                let rel = if scale > T::zero() { rn / scale } else { rn };
                worst = worst.max(rel.as_f64());
                if rel > tol {
                    ok = false;
                }
                residuals.push(rn / head.column(i).norm());
            }
            if ok {
                return Ok(EigenPairs {
                    values: values[..count].to_vec(),
                    vectors: head,
                    residuals,
                    iterations: it,
                });
            }
        }
        x = if kept < block {
            let mut fresh = random_block::<T>(&mut rng, n, block - kept);
            if let Some(proj) = p.project {
                proj(&mut fresh);
            }
            let mut next = DMatrix::zeros(n, block);
            next.columns_mut(0, kept).copy_from(&vecs);
            next.columns_mut(kept, block - kept).copy_from(&fresh);
            next
        } else {
            vecs
        };
    }
    Err(Error::EigenNoConvergence {
        iterations: opts.max_iter,
        residual: worst,
    })
}

/// Problems up to this size go through a dense solve.
pub const DENSE_EIGEN_LIMIT: usize = 2000;

/// Smallest `count` eigenpairs of a dense symmetric pencil `A x = λ B x`
/// with `B` positive definite, via `L⁻¹ A L⁻ᵀ`.
pub fn dense_smallest_eigenpairs<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>, count: usize) -> Result<EigenPairs<T>> {
    let n = a.nrows();
    let chol =
        nalgebra::Cholesky::new(b.clone()).ok_or_else(|| Error::NotPositiveDefinite("pencil mass matrix".into()))?;
    let l = chol.l();
    let linv = l
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::NotPositiveDefinite("pencil mass matrix".into()))?;
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * T::lit(0.5);
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("finite eigenvalues")
    });
    let k = count.min(n);
    let mut vectors = DMatrix::zeros(n, k);
    let mut values = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (col, &i) in order.iter().take(k).enumerate() {
        let x = linv.transpose() * eig.eigenvectors.column(i);
        let lam = eig.eigenvalues[i];
        let r = a * &x - b * &x * lam;
        residuals.push(r.norm() / x.norm());
        values.push(lam);
        vectors.set_column(col, &x);
    }
    Ok(EigenPairs {
        values,
        vectors,
        residuals,
        iterations: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SpdFactor;

    #[test]
    fn diagonal_pencil() {
        let n = 40;
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let b = DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 } else { 0.0 });
        let f = SpdFactor::new(a.clone(), "a").unwrap();
        let aa = |x: &DMatrix<f64>| &a * x;
        let bb = |x: &DMatrix<f64>| &b * x;
        let inv = |x: &DMatrix<f64>| f.solve_mat(x);
        let prob = EigenProblem {
            n,
            apply_a: &aa,
            apply_b: &bb,
            apply_inv: &inv,
            project: None,
        };
        let res = smallest_eigenpairs(&prob, &EigenOptions::new(3)).unwrap();
        for (k, v) in res.values.iter().enumerate() {
            assert!((v - (k + 1) as f64 / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn laplacian_1d_matches_closed_form() {
        // Dirichlet second-difference matrix: λ_k = 2 − 2cos(kπ/(n+1)).
        let n = 60;
        let a = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let f = SpdFactor::new(a.clone(), "a").unwrap();
        let aa = |x: &DMatrix<f64>| &a * x;
        let bb = |x: &DMatrix<f64>| x.clone();
        let inv = |x: &DMatrix<f64>| f.solve_mat(x);
        let prob = EigenProblem {
            n,
            apply_a: &aa,
            apply_b: &bb,
            apply_inv: &inv,
            project: None,
        };
        let res = smallest_eigenpairs(&prob, &EigenOptions::new(2)).unwrap();
        let exact = |k: f64| 2.0 - 2.0 * (k * std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((res.values[0] - exact(1.0)).abs() < 1e-11);
        assert!((res.values[1] - exact(2.0)).abs() < 1e-11);
        assert!(res.residuals.iter().all(|&r| r < 1e-8));
    }

    #[test]
    fn dense_pencil_matches_closed_form() {
        let n = 50;
        let a = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let b = DMatrix::from_fn(n, n, |i, j| if i == j { 4.0 } else { 0.0 });
        let res = dense_smallest_eigenpairs(&a, &b, 2).unwrap();
        let exact = |k: f64| (2.0 - 2.0 * (k * std::f64::consts::PI / (n as f64 + 1.0)).cos()) / 4.0;
        assert!((res.values[0] - exact(1.0)).abs() < 1e-13);
        assert!((res.values[1] - exact(2.0)).abs() < 1e-13);
        assert!(res.residuals.iter().all(|&r| r < 1e-12));
    }
}
