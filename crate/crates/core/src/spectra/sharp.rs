use super::poincare::SpectralConstant;
use crate::error::{Error, Result};
use crate::hodge::HodgeSolver;
use crate::linalg::{restrict, smallest_eigenpairs, to_dense, EigenOptions, EigenProblem, GramProjector, SpdFactor};
use crate::scalar::Real;
use crate::tensor::{skew_basis, TensorField, TensorForms};
use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

/// Eigenvalues below this count as a singular form.
const SINGULAR_EIGENVALUE: f64 = 1e-10;

#[derive(Clone, Copy, Debug)]
pub struct SharpConstant<T: Real> {
    pub constant: SpectralConstant<T>,
    /// Constant skew fields were factored out.
    pub deflated_so: bool,
    pub dofs: usize,
}

impl<T: Real> SharpConstant<T> {
    pub fn value(&self) -> T {
        self.constant.value
    }
}

/// Stacked DOF indices of tensor fields whose rows lie in the
/// tangentially constrained 1-forms.
pub fn tensor_free_dofs<T: Real>(solver: &HodgeSolver<'_, T>) -> Vec<usize> {
    let ne = solver.complex().count(1);
    let free = solver.space(1).free();
    (0..solver.dim())
        .flat_map(|a| free.iter().map(move |&e| a * ne + e))
        .collect()
}

fn so_fields<T: Real>(solver: &HodgeSolver<'_, T>, dofs: &[usize]) -> DMatrix<T> {
    let basis = skew_basis::<T>(solver.dim());
    let mut q = DMatrix::zeros(dofs.len(), basis.len());
    for (k, s) in basis.iter().enumerate() {
        let f = TensorField::constant(solver.complex(), s);
        let v = f.stacked();
        for (r, &i) in dofs.iter().enumerate() {
            q[(r, k)] = v[i];
        }
    }
    q
}

fn singular_error<T: Real>(solver: &HodgeSolver<'_, T>, a: &DMatrix<T>, b: &DMatrix<T>, dofs: &[usize]) -> Error {
    let Some(chol) = Cholesky::new(a.clone()) else {
        return Error::NotPositiveDefinite("tensor mass matrix".into());
    };
    let l = chol.l();
    let linv = l.clone().try_inverse().expect("triangular factor is invertible");
    let c = &linv * b * linv.transpose();
    let c = (&c + c.transpose()) * T::lit(0.5);
    let eig = SymmetricEigen::new(c);
    let (k, &lam) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(y.1).unwrap())
        .expect("nonempty");
    let x = linv.transpose() * eig.eigenvectors.column(k);
    let q = so_fields(solver, dofs);
    let ax = a * &x;
    let skew_matrix = GramProjector::new(q.clone(), a * &q).ok().and_then(|p| {
        let coef = p.coefficients(&DMatrix::from_column_slice(x.len(), 1, x.as_slice()));
        let fit = &q * &coef;
        let diff = &x - fit.column(0);
        let rel = (diff.dot(&(a * &diff)) / x.dot(&ax)).max(T::zero()).sqrt();
        (rel < T::lit(1e-6)).then(|| {
            let n = solver.dim();
            let mut s = vec![vec![0.0; n]; n];
            for (kk, e) in skew_basis::<T>(n).iter().enumerate() {
                for i in 0..n {
                    for j in 0..n {
                        s[i][j] += (coef[(kk, 0)] * e[i * n + j]).as_f64();
                    }
                }
            }
            s
        })
    });
    let ne = solver.complex().count(1);
    let mut full = vec![0.0; solver.dim() * ne];
    for (r, &i) in dofs.iter().enumerate() {
        full[i] = x[r].as_f64();
    }
    let message = if skew_matrix.is_some() {
        "the form ‖sym T‖² + ‖Curl T‖² is singular: a constant skew-symmetric field lies in its kernel".to_string()
    } else {
        "the form ‖sym T‖² + ‖Curl T‖² is singular".to_string()
    };
    Error::SingularForm {
        message,
        eigenvalue: lam.as_f64(),
        eigenvector: full,
        skew_matrix,
    }
}

/// Sharp constant of the main inequality: `λ^{-1/2}` for the smallest
/// eigenvalue of `(B_sym + B_curl) x = λ A x` over tensor fields with rows
/// in the constrained 1-forms. With `deflate_so`, constant skew fields are
/// factored out (only meaningful when `Γ_t = ∅`).
pub fn sharp_mixed_constant<T: Real>(
    solver: &HodgeSolver<'_, T>,
    forms: &TensorForms<T>,
    deflate_so: bool,
) -> Result<SharpConstant<T>> {
    if deflate_so && !solver.partition().is_tangential_empty() {
        return Err(Error::Precondition(
            "skew deflation requires an empty tangential part".into(),
        ));
    }
    let dofs = tensor_free_dofs(solver);
    if dofs.is_empty() {
        return Err(Error::NoInteriorDofs);
    }
    let a = to_dense(&restrict(&forms.mass, &dofs, &dofs));
    let bs = restrict(&forms.sym, &dofs, &dofs);
    let bc = restrict(&forms.curl, &dofs, &dofs);
    let b = to_dense(&bs) + to_dense(&bc);
    let b = (&b + b.transpose()) * T::lit(0.5);

    let projector = if deflate_so {
        let q = so_fields(solver, &dofs);
        Some(GramProjector::new(q.clone(), &a * &q)?)
    } else {
        None
    };
    let op = match &projector {
        Some(p) => &b + p.gauge(),
        None => b.clone(),
    };
    let factor = match SpdFactor::new(op, "sym + curl form") {
        Ok(f) => f,
        Err(_) => return Err(singular_error(solver, &a, &b, &dofs)),
    };
    let aop = |x: &DMatrix<T>| &b * x;
    let bop = |x: &DMatrix<T>| &a * x;
    let inv = |x: &DMatrix<T>| factor.solve_mat(x);
    let proj = |x: &mut DMatrix<T>| {
        if let Some(p) = &projector {
            p.apply(x)
        }
    };
    let deflated = projector.as_ref().map_or(0, |p| p.rank());
    let prob = EigenProblem {
        n: dofs.len(),
        apply_a: &aop,
        apply_b: &bop,
        apply_inv: &inv,
        project: projector.as_ref().map(|_| &proj as &(dyn Fn(&mut DMatrix<T>) + Sync)),
    };
    let mut opts = EigenOptions::new(1);
    opts.block = 8.min(dofs.len() - deflated);
    opts.tol = T::solver_tol().as_f64();
    let pairs = smallest_eigenpairs(&prob, &opts)?;
    if pairs.values[0] < T::lit(SINGULAR_EIGENVALUE) {
        return Err(singular_error(solver, &a, &b, &dofs));
    }
    Ok(SharpConstant {
        constant: SpectralConstant::from_eigen(pairs.values[0], pairs.residuals[0], pairs.iterations)?,
        deflated_so: deflate_so,
        dofs: dofs.len() - deflated,
    })
}
