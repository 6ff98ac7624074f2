use super::field::TensorField;
use super::forms::{whitney1_at, TENSOR_QUADRATURE_DEGREE};
use super::material::MaterialField;
use crate::error::Result;
use crate::forms::Cochain;
use crate::linalg::csr_from_triplets;
use crate::mesh::{local_subsets, SimplicialComplex};
use crate::quadrature::SimplexRule;
use crate::scalar::Real;
use nalgebra::DVector;
use nalgebra_sparse::CsrMatrix;

/// `‖T‖`, `‖sym(μT)‖` and `‖skew(μT)‖` from pointwise quadrature.
#[derive(Clone, Copy, Debug)]
pub struct SymSkewNorms<T: Real> {
    pub full: T,
    pub sym: T,
    pub skew: T,
}

pub fn sym_skew_norms<T: Real>(
    complex: &SimplicialComplex<T>,
    t: &TensorField<T>,
    material: Option<&MaterialField<T>>,
) -> Result<SymSkewNorms<T>> {
    let n = complex.dim();
    let rule = SimplexRule::<T>::of_degree(n, TENSOR_QUADRATURE_DEGREE);
    let (mut f2, mut s2, mut k2) = (T::zero(), T::zero(), T::zero());
    let half = T::lit(0.5);
    for c in 0..complex.n_cells() {
        let vol = complex.volume(c);
        for (p, &w) in rule.points.iter().zip(&rule.weights) {
            let m = t.value_at(complex, c, p)?;
            let mm = match material {
                Some(mu) => {
                    let a = mu.at(complex, c, p);
                    let mut out = vec![T::zero(); n * n];
                    for i in 0..n {
                        for j in 0..n {
                            out[i * n + j] = (0..n).fold(T::zero(), |s, k| s + a[i * n + k] * m[k * n + j]);
                        }
                    }
                    out
                }
                None => m.clone(),
            };
            for i in 0..n {
                for j in 0..n {
                    let sy = half * (mm[i * n + j] + mm[j * n + i]);
                    let sk = half * (mm[i * n + j] - mm[j * n + i]);
                    f2 += w * vol * m[i * n + j] * m[i * n + j];
                    s2 += w * vol * sy * sy;
                    k2 += w * vol * sk * sk;
                }
            }
        }
    }
    Ok(SymSkewNorms {
        full: f2.sqrt(),
        sym: s2.sqrt(),
        skew: k2.sqrt(),
    })
}

/// Linear map from stacked tensor DOFs to `vec(∫ T)` over a set of cells.
pub fn integral_map<T: Real>(complex: &SimplicialComplex<T>, cells: &[usize]) -> CsrMatrix<T> {
    let n = complex.dim();
    let ne = complex.count(1);
    let edges = local_subsets(n + 1, 2);
    let centre = vec![T::one() / T::from_count(n + 1); n + 1];
    let mut trip = Vec::new();
    for &c in cells {
        let glob = complex.cell_faces(c, 1);
        let phi = whitney1_at(complex, c, &centre, &edges);
        let vol = complex.volume(c);
        for (le, &e) in glob.iter().enumerate() {
            for a in 0..n {
                for k in 0..n {
                    trip.push((a * n + k, a * ne + e, vol * phi[le][k]));
                }
            }
        }
    }
    csr_from_triplets(n * n, n * ne, &trip)
}

/// Skew part of a matrix (row-major).
pub fn skew_part<T: Real>(m: &[T], n: usize) -> Vec<T> {
    let half = T::lit(0.5);
    let mut s = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            s[i * n + j] = half * (m[i * n + j] - m[j * n + i]);
        }
    }
    s
}

/// Skew part of the mean of `T` over the given cells (all cells if `None`).
pub fn pi_so<T: Real>(complex: &SimplicialComplex<T>, t: &TensorField<T>, cells: Option<&[usize]>) -> Vec<T> {
    let all: Vec<usize>;
    let cells = match cells {
        Some(c) => c,
        None => {
            all = (0..complex.n_cells()).collect();
            &all
        }
    };
    let vol = cells.iter().fold(T::zero(), |s, &c| s + complex.volume(c));
    let g = integral_map(complex, cells);
    let integral = crate::linalg::mul_vec(&g, &t.stacked());
    let mean: Vec<T> = integral.iter().map(|&x| x / vol).collect();
    skew_part(&mean, complex.dim())
}

/// Rigid motion `r(x) = S x + b` matching a P1 vector field in the sense
/// that `v − r` has zero mean and `Grad(v − r)` has zero skew mean.
#[derive(Clone, Debug)]
pub struct RigidMotion<T: Real> {
    pub skew: Vec<T>,
    pub translation: Vec<T>,
    /// `|mean(v − r)|` recomputed from vertex values.
    pub mean_residual: T,
    /// `|π_so Grad(v − r)|` recomputed from the coboundary.
    pub skew_residual: T,
}

fn p1_mean<T: Real>(complex: &SimplicialComplex<T>, vals: &DVector<T>) -> T {
    let n = complex.dim();
    let mut s = T::zero();
    for c in 0..complex.n_cells() {
        let avg = complex.cell(c).iter().fold(T::zero(), |a, &v| a + vals[v]) / T::from_count(n + 1);
        s += complex.volume(c) * avg;
    }
    s / complex.total_volume()
}

pub fn rigid_motion_projection<T: Real>(complex: &SimplicialComplex<T>, v: &[Cochain<T>]) -> Result<RigidMotion<T>> {
    let n = complex.dim();
    let grad = super::field::grad_vector_field(complex, v)?;
    let skew = pi_so(complex, &grad, None);
    let coord = |k: usize| DVector::from_fn(complex.n_vertices(), |i, _| complex.vertex(i)[k]);
    let xbar: Vec<T> = (0..n).map(|k| p1_mean(complex, &coord(k))).collect();
    let translation: Vec<T> = (0..n)
        .map(|a| p1_mean(complex, v[a].values()) - (0..n).fold(T::zero(), |s, k| s + skew[a * n + k] * xbar[k]))
        .collect();
    let rest: Vec<Cochain<T>> = (0..n)
        .map(|a| {
            let vals = DVector::from_fn(complex.n_vertices(), |i, _| {
                let x = complex.vertex(i);
                v[a].values()[i] - translation[a] - (0..n).fold(T::zero(), |s, k| s + skew[a * n + k] * x[k])
            });
            Cochain::new(complex, 0, vals)
        })
        .collect::<Result<_>>()?;
    let mean_residual = (0..n).fold(T::zero(), |m, a| m.max(p1_mean(complex, rest[a].values()).abs()));
    let g = super::field::grad_vector_field(complex, &rest)?;
    let skew_residual = pi_so(complex, &g, None).iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    Ok(RigidMotion {
        skew,
        translation,
        mean_residual,
        skew_residual,
    })
}
