//! Cochains, Whitney forms and the discrete operators on them.

mod cochain;
mod constrained;
mod operators;
mod whitney;

pub use cochain::Cochain;
pub use constrained::{
    l2_inner, l2_norm, weak_codifferential, weak_codifferential_constrained, ConstrainedSpace, Side,
};
pub use operators::{coboundary, mass_matrix, FormOperator, FormSystem};
pub(crate) use whitney::det_small as det;
pub use whitney::{local_components, local_mass, to_proxy};

use crate::error::{Error, Result};
use crate::mesh::SimplicialComplex;
use crate::scalar::Real;

/// Number of proxy components of a q-form in dimension `n`.
pub fn proxy_len(n: usize, q: usize) -> usize {
    crate::mesh::local_subsets(n, q).len()
}

/// Proxy of the Whitney form of `u` at barycentric point `bary` of `cell`.
///
/// Degrees 0 and N give scalars, degree 1 a vector, and degree 2 in three
/// dimensions the curl-ordered vector `(ω23, −ω13, ω12)`. Higher-dimensional
/// components are listed lexicographically.
pub fn evaluate_proxy<T: Real>(
    complex: &SimplicialComplex<T>,
    u: &Cochain<T>,
    cell: usize,
    bary: &[T],
) -> Result<Vec<T>> {
    u.check_on(complex)?;
    let n = complex.dim();
    if cell >= complex.n_cells() {
        return Err(Error::Precondition(format!("cell {cell} out of range")));
    }
    if bary.len() != n + 1 {
        return Err(Error::LengthMismatch {
            expected: n + 1,
            found: bary.len(),
        });
    }
    let tol = T::lit(1e-12);
    let sum = bary.iter().fold(T::zero(), |a, &b| a + b);
    if bary.iter().any(|&b| b < -tol) || (sum - T::one()).abs() > tol {
        return Err(Error::Precondition("point lies outside the cell".into()));
    }
    let q = u.degree();
    let faces = complex.cell_faces(cell, q);
    let sign = if q == n && complex.cell_sign(cell) < 0 {
        -T::one()
    } else {
        T::one()
    };
    let vals: Vec<T> = faces.iter().map(|&f| u.values()[f] * sign).collect();
    Ok(to_proxy(n, q, local_components(complex, cell, q, &vals, bary)))
}
