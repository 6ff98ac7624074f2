use super::solver::HodgeSolver;
use crate::error::Result;
use crate::forms::Cochain;
use crate::linalg::{bilinear, mul_tr_vec, mul_vec};
use crate::scalar::Real;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Orthonormal basis of the discrete harmonic forms of one degree.
#[derive(Clone, Debug)]
pub struct HarmonicSpace<T: Real> {
    pub degree: usize,
    pub basis: Vec<Cochain<T>>,
    /// Dimension found by the eigen route.
    pub eigen_dim: usize,
    /// Dimension from exact integer ranks.
    pub exact_dim: usize,
    pub kernel_eigenvalues: Vec<T>,
}

/// Exact component `d E` with its minimal-norm potential.
#[derive(Clone, Debug)]
pub struct ExactPart<T: Real> {
    pub potential: Option<Cochain<T>>,
    pub part: Cochain<T>,
}

/// Coexact component. `inner` is its part inside the constrained space,
/// `boundary_layer` the part orthogonal to the constrained space, and
/// `potential` satisfies `δ potential = inner` weakly.
#[derive(Clone, Debug)]
pub struct CoexactPart<T: Real> {
    pub part: Cochain<T>,
    pub inner: Cochain<T>,
    pub boundary_layer: Cochain<T>,
    pub potential: Option<Cochain<T>>,
}

/// Residuals of a decomposition, relative to `‖F‖` or `‖F‖²`.
#[derive(Clone, Debug, Serialize)]
pub struct SplitDiagnostics {
    pub reconstruction: f64,
    pub exact_harmonic: f64,
    pub exact_coexact: f64,
    pub harmonic_coexact: f64,
    pub pythagoras: f64,
    pub harmonic_residual: f64,
}

impl SplitDiagnostics {
    pub fn max_orthogonality(&self) -> f64 {
        self.exact_harmonic.max(self.exact_coexact).max(self.harmonic_coexact)
    }
}

#[derive(Clone, Debug)]
pub struct HodgeSplit<T: Real> {
    pub exact: ExactPart<T>,
    pub harmonic: Cochain<T>,
    pub coexact: CoexactPart<T>,
    pub norm: T,
    pub diagnostics: SplitDiagnostics,
}

impl<T: Real> HodgeSolver<'_, T> {
    /// Harmonic forms of degree `q` in the tangentially constrained space.
    pub fn harmonic_space(&self, q: usize) -> Result<HarmonicSpace<T>> {
        let data = self.degree(q)?;
        let id = self.complex().id();
        let basis = (0..data.harmonic.ncols())
            .map(|k| Cochain::raw(id, q, data.space.prolong(&data.harmonic.column(k).into_owned())))
            .collect();
        Ok(HarmonicSpace {
            degree: q,
            basis,
            eigen_dim: data.harmonic.ncols(),
            exact_dim: data.exact_harmonic_dim,
            kernel_eigenvalues: data.kernel_eigenvalues.clone(),
        })
    }

    /// Harmonic dimensions of every degree by both routes.
    pub fn betti_pair(&self) -> Result<Vec<(usize, usize)>> {
        (0..=self.dim())
            .map(|q| {
                let h = self.harmonic_space(q)?;
                Ok((h.eigen_dim, h.exact_dim))
            })
            .collect()
    }

    /// Projection onto `d V^{q-1}_t`.
    pub fn project_exact(&self, f: &Cochain<T>) -> Result<ExactPart<T>> {
        self.system().check(f)?;
        let q = f.degree();
        let id = f.complex_id();
        if q == 0 {
            return Ok(ExactPart {
                potential: None,
                part: Cochain::raw(id, 0, DVector::zeros(f.values().len())),
            });
        }
        let lower = self.degree(q - 1)?;
        let space = self.space(q);
        let mf = space.restrict(&mul_vec(self.system().mass(q), f.values()));
        let rhs = mul_tr_vec(&lower.d, &mf);
        let e = lower.gauged.solve(&rhs);
        let e_full = lower.space.prolong(&e);
        let de = mul_vec(self.system().d(q - 1), &e_full);
        Ok(ExactPart {
            potential: Some(Cochain::raw(id, q - 1, e_full)),
            part: Cochain::raw(id, q, de),
        })
    }

    /// Coexact component: the part of `F` orthogonal to the kernel of `d`
    /// in the constrained space, plus the part orthogonal to that space.
    pub fn project_coexact(&self, f: &Cochain<T>) -> Result<CoexactPart<T>> {
        self.system().check(f)?;
        let q = f.degree();
        let id = f.complex_id();
        let data = self.degree(q)?;
        let mf = data.space.restrict(&mul_vec(self.system().mass(q), f.values()));
        let x = data.mass_factor.solve(&mf);
        let layer = f.values() - data.space.prolong(&x);
        let (inner, potential) = if q < self.dim() && !data.is_empty() {
            let xm = DMatrix::from_column_slice(x.len(), 1, x.as_slice());
            let sigma = data.project_off_kernel(&xm).column(0).into_owned();
            let phi = data.gauged.solve(&mul_vec(&data.mass, &sigma));
            let upper = self.space(q + 1);
            let pot = upper.prolong(&mul_vec(&data.d, &phi));
            (data.space.prolong(&sigma), Some(Cochain::raw(id, q + 1, pot)))
        } else {
            (DVector::zeros(f.values().len()), None)
        };
        Ok(CoexactPart {
            part: Cochain::raw(id, q, &inner + &layer),
            inner: Cochain::raw(id, q, inner),
            boundary_layer: Cochain::raw(id, q, layer),
            potential,
        })
    }

    /// Three-way orthogonal decomposition `F = dE + h + coexact`.
    pub fn hodge_decompose(&self, f: &Cochain<T>) -> Result<HodgeSplit<T>> {
        let q = f.degree();
        let exact = self.project_exact(f)?;
        let coexact = self.project_coexact(f)?;
        let data = self.degree(q)?;
        let m = self.system().mass(q);
        let hv = f.values() - exact.part.values() - coexact.part.values();
        let harmonic = Cochain::raw(f.complex_id(), q, hv);

        let ip = |a: &DVector<T>, b: &DVector<T>| bilinear(m, a, b);
        let nf2 = ip(f.values(), f.values());
        let nf = nf2.max(T::zero()).sqrt();
        let denom2 = if nf2 > T::zero() { nf2 } else { T::one() };
        let denom = if nf > T::zero() { nf } else { T::one() };
        let (e, h, c) = (exact.part.values(), harmonic.values(), coexact.part.values());
        let recon = f.values() - e - h - c;
        let pyth = nf2 - ip(e, e) - ip(h, h) - ip(c, c);

        // Distance of h from the span of the computed harmonic basis.
        let h_t = data.space.restrict(h);
        let coeff = data.harmonic_coefficients(&h_t);
        let proj = &data.harmonic * coeff;
        let off = data.space.prolong(&(&h_t - proj));
        let outside = data.space.violation(h);
        let hres = ip(&off, &off).max(T::zero()).sqrt() + outside;

        let diagnostics = SplitDiagnostics {
            reconstruction: (ip(&recon, &recon).max(T::zero()).sqrt() / denom).as_f64(),
            exact_harmonic: (ip(e, h).abs() / denom2).as_f64(),
            exact_coexact: (ip(e, c).abs() / denom2).as_f64(),
            harmonic_coexact: (ip(h, c).abs() / denom2).as_f64(),
            pythagoras: (pyth.abs() / denom2).as_f64(),
            harmonic_residual: (hres / denom).as_f64(),
        };
        Ok(HodgeSplit {
            exact,
            harmonic,
            coexact,
            norm: nf,
            diagnostics,
        })
    }

    /// Applies the projection onto the kernel of `d` (exact plus harmonic
    /// forms) to a block of full-space cochains of degree `q` that already
    /// lie in the constrained space.
    pub fn project_closed_block(&self, q: usize, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        let data = self.degree(q)?;
        let space = self.space(q);
        let mut xt = DMatrix::zeros(space.len(), x.ncols());
        for (k, &i) in space.free().iter().enumerate() {
            xt.row_mut(k).copy_from(&x.row(i));
        }
        let off = data.project_off_kernel(&xt);
        let closed = xt - off;
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for (k, &i) in space.free().iter().enumerate() {
            out.row_mut(i).copy_from(&closed.row(k));
        }
        Ok(out)
    }
}
