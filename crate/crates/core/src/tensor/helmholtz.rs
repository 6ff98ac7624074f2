use super::field::TensorField;
use crate::error::{Error, Result};
use crate::forms::Cochain;
use crate::hodge::{DegreeData, HodgeSolver};
use crate::linalg::{bilinear, mul_tr_vec, mul_vec};
use crate::scalar::Real;
use nalgebra::DVector;
use std::sync::Arc;

/// `T = R + S` with `R` the curl-free part (exact plus harmonic rows) and
/// `S` the remainder, orthogonal to every closed constrained 1-form.
#[derive(Clone, Debug)]
pub struct TensorSplit<T: Real> {
    pub r: TensorField<T>,
    pub s: TensorField<T>,
    /// `|⟨R, S⟩| / ‖T‖²`.
    pub orthogonality: T,
    /// `|‖T‖² − ‖R‖² − ‖S‖²| / ‖T‖²`.
    pub pythagoras: T,
}

/// Row-wise projection onto the closed constrained 1-forms, with the
/// factorizations needed for repeated use.
pub(crate) struct ClosedProjector<'s, 'a, T: Real> {
    solver: &'s HodgeSolver<'a, T>,
    lower: Arc<DegreeData<T>>,
    harmonic: Option<Arc<DegreeData<T>>>,
}

impl<'s, 'a, T: Real> ClosedProjector<'s, 'a, T> {
    pub(crate) fn new(solver: &'s HodgeSolver<'a, T>) -> Result<Self> {
        let lower = solver.degree(0)?;
        let harmonic = if solver.exact_harmonic_dim(1)? > 0 {
            Some(solver.degree(1)?)
        } else {
            None
        };
        Ok(Self {
            solver,
            lower,
            harmonic,
        })
    }

    /// Closed part of one row given by full edge values in the constrained space.
    pub(crate) fn closed_part(&self, row: &DVector<T>) -> DVector<T> {
        let sys = self.solver.system();
        let space = self.solver.space(1);
        let mf = space.restrict(&mul_vec(sys.mass(1), row));
        let e = self.lower.gauged.solve(&mul_tr_vec(&self.lower.d, &mf));
        let mut out = mul_vec(sys.d(0), &self.lower.space.prolong(&e));
        if let Some(h) = &self.harmonic {
            let coef = h.harmonic_coefficients(&space.restrict(row));
            out += space.prolong(&(&h.harmonic * coef));
        }
        out
    }
}

fn check_rows<T: Real>(solver: &HodgeSolver<'_, T>, t: &TensorField<T>) -> Result<()> {
    let space = solver.space(1);
    for (a, r) in t.rows().iter().enumerate() {
        r.check_on(solver.complex())?;
        let scale = r.values().amax().max(T::one());
        if space.violation(r.values()) > T::lit(1e-12) * scale {
            return Err(Error::Precondition(format!(
                "row {a} has nonzero values on tangentially constrained edges"
            )));
        }
    }
    Ok(())
}

/// Row-wise Helmholtz split of a tensor field whose rows lie in the
/// tangentially constrained 1-forms.
pub fn helmholtz_split_tensor<T: Real>(solver: &HodgeSolver<'_, T>, t: &TensorField<T>) -> Result<TensorSplit<T>> {
    check_rows(solver, t)?;
    let proj = ClosedProjector::new(solver)?;
    let complex = solver.complex();
    let m1 = solver.system().mass(1);
    let mut r_rows = Vec::with_capacity(t.dim());
    let mut s_rows = Vec::with_capacity(t.dim());
    let (mut tt, mut rr, mut ss, mut rs) = (T::zero(), T::zero(), T::zero(), T::zero());
    for row in t.rows() {
        let r = proj.closed_part(row.values());
        let s = row.values() - &r;
        tt += bilinear(m1, row.values(), row.values());
        rr += bilinear(m1, &r, &r);
        ss += bilinear(m1, &s, &s);
        rs += bilinear(m1, &r, &s);
        r_rows.push(Cochain::new(complex, 1, r)?);
        s_rows.push(Cochain::new(complex, 1, s)?);
    }
    let denom = if tt > T::zero() { tt } else { T::one() };
    Ok(TensorSplit {
        r: TensorField::new(complex, r_rows)?,
        s: TensorField::new(complex, s_rows)?,
        orthogonality: rs.abs() / denom,
        pythagoras: (tt - rr - ss).abs() / denom,
    })
}
