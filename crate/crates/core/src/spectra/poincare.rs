use crate::error::{Error, Result};
use crate::hodge::HodgeSolver;
use crate::linalg::{mul_mat, smallest_eigenpairs, EigenOptions, EigenProblem};
use crate::scalar::Real;
use nalgebra::DMatrix;

/// Constant obtained as `λ^{-1/2}` from the smallest eigenvalue of a pencil.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralConstant<T: Real> {
    pub value: T,
    pub eigenvalue: T,
    /// `‖A x − λ B x‖ / ‖x‖` of the extremal pair.
    pub residual: T,
    pub iterations: usize,
}

impl<T: Real> SpectralConstant<T> {
    pub(crate) fn from_eigen(lambda: T, residual: T, iterations: usize) -> Result<Self> {
        if lambda <= T::zero() {
            return Err(Error::NonPositiveConstant(lambda.as_f64()));
        }
        Ok(Self {
            value: T::one() / lambda.sqrt(),
            eigenvalue: lambda,
            residual,
            iterations,
        })
    }
}

/// Poincaré constant of degree `q` and the two one-sided constants it is
/// built from.
#[derive(Clone, Copy, Debug)]
pub struct PoincareConstant<T: Real> {
    pub degree: usize,
    pub value: T,
    /// Bound for `d`-potentials of exact q-forms (from degree `q−1`).
    pub exact_side: Option<SpectralConstant<T>>,
    /// Bound for q-forms orthogonal to the kernel of `d`.
    pub coexact_side: Option<SpectralConstant<T>>,
}

/// Smallest nonzero eigenvalue of `(dᵀMd, M)` on the complement of the
/// kernel of `d` within the constrained q-forms, as a constant `λ^{-1/2}`.
/// `None` when that complement is trivial.
pub fn d_constant<T: Real>(solver: &HodgeSolver<'_, T>, q: usize) -> Result<Option<SpectralConstant<T>>> {
    if q >= solver.dim() {
        return Ok(None);
    }
    let data = solver.degree(q)?;
    let rank = data.rank_d;
    if rank == 0 {
        return Ok(None);
    }
    let a = |x: &DMatrix<T>| mul_mat(&data.stiffness, x);
    let b = |x: &DMatrix<T>| mul_mat(&data.mass, x);
    let inv = |x: &DMatrix<T>| data.gauged.solve_mat(x);
    let proj = |x: &mut DMatrix<T>| *x = data.project_off_kernel(x);
    let prob = EigenProblem {
        n: data.len(),
        apply_a: &a,
        apply_b: &b,
        apply_inv: &inv,
        project: Some(&proj),
    };
    let mut opts = EigenOptions::new(1);
    opts.block = 8.min(rank);
    opts.tol = T::solver_tol().as_f64();
    let pairs = smallest_eigenpairs(&prob, &opts)?;
    Ok(Some(SpectralConstant::from_eigen(
        pairs.values[0],
        pairs.residuals[0],
        pairs.iterations,
    )?))
}

/// Poincaré constant in degree `q`: the larger of the one-sided constants
/// of degrees `q` and `q − 1`.
pub fn poincare_constant<T: Real>(solver: &HodgeSolver<'_, T>, q: usize) -> Result<PoincareConstant<T>> {
    solver.complex().check_degree(q)?;
    let coexact_side = d_constant(solver, q)?;
    let exact_side = if q > 0 { d_constant(solver, q - 1)? } else { None };
    let value = match (exact_side, coexact_side) {
        (None, None) => return Err(Error::NoInteriorDofs),
        (Some(a), None) => a.value,
        (None, Some(b)) => b.value,
        (Some(a), Some(b)) => a.value.max(b.value),
    };
    Ok(PoincareConstant {
        degree: q,
        value,
        exact_side,
        coexact_side,
    })
}

/// Maxwell constant: the Poincaré constant of 1-forms.
pub fn maxwell_constant<T: Real>(solver: &HodgeSolver<'_, T>) -> Result<PoincareConstant<T>> {
    poincare_constant(solver, 1)
}
