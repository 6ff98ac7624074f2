use super::material::MaterialField;
use crate::error::Result;
use crate::forms::FormSystem;
use crate::linalg::{csr_from_triplets, triple_product};
use crate::mesh::{local_subsets, SimplicialComplex};
use crate::quadrature::SimplexRule;
use crate::scalar::Real;
use nalgebra_sparse::CsrMatrix;

/// Quadrature degree used for every tensor bilinear form.
pub const TENSOR_QUADRATURE_DEGREE: usize = 5;

/// Quadratic forms on tensor fields whose rows are Whitney 1-forms,
/// indexed by `row * n_edges + edge`.
#[derive(Clone, Debug)]
pub struct TensorForms<T: Real> {
    pub dim: usize,
    pub n_edges: usize,
    /// `∫ T : T`.
    pub mass: CsrMatrix<T>,
    /// `∫ |sym(μT)|²`.
    pub sym: CsrMatrix<T>,
    /// `∫ |skew(μT)|²`.
    pub skew: CsrMatrix<T>,
    /// `∫ |Curl T|²`.
    pub curl: CsrMatrix<T>,
}

/// Values of the Whitney 1-forms of a cell at a barycentric point, one
/// vector per local edge in lexicographic order.
pub(crate) fn whitney1_at<T: Real>(
    complex: &SimplicialComplex<T>,
    c: usize,
    bary: &[T],
    edges: &[Vec<usize>],
) -> Vec<Vec<T>> {
    let n = complex.dim();
    let g = complex.grad_lambda(c);
    edges
        .iter()
        .map(|e| {
            let (i, j) = (e[0], e[1]);
            (0..n)
                .map(|r| bary[i] * g[j * n + r] - bary[j] * g[i * n + r])
                .collect()
        })
        .collect()
}

impl<T: Real> TensorForms<T> {
    pub fn assemble(system: &FormSystem<'_, T>, material: Option<&MaterialField<T>>) -> Result<Self> {
        let complex = system.complex();
        let n = complex.dim();
        let ne = complex.count(1);
        let rule = SimplexRule::<T>::of_degree(n, TENSOR_QUADRATURE_DEGREE);
        let local_edges = local_subsets(n + 1, 2);
        let half = T::lit(0.5);
        let mut tm = Vec::new();
        let mut ts = Vec::new();
        let mut tk = Vec::new();
        for c in 0..complex.n_cells() {
            let edges = complex.cell_faces(c, 1);
            let vol = complex.volume(c);
            let le = edges.len();
            let mut loc_m = vec![T::zero(); n * n * le * le];
            let mut loc_s = loc_m.clone();
            let mut loc_k = loc_m.clone();
            let idx = |a: usize, e: usize, b: usize, f: usize| ((a * le + e) * n + b) * le + f;
            for (p, &w) in rule.points.iter().zip(&rule.weights) {
                let phi = whitney1_at(complex, c, p, &local_edges);
                let mu = material.map(|m| m.at(complex, c, p));
                // Column `a` of μ, i.e. μ e_a.
                let col = |a: usize| -> Vec<T> {
                    match &mu {
                        Some(m) => (0..n).map(|k| m[k * n + a]).collect(),
                        None => (0..n).map(|k| if k == a { T::one() } else { T::zero() }).collect(),
                    }
                };
                let cols: Vec<Vec<T>> = (0..n).map(col).collect();
                let wv = w * vol;
                for a in 0..n {
                    for b in 0..n {
                        let uw: T = (0..n).fold(T::zero(), |s, k| s + cols[a][k] * cols[b][k]);
                        for e in 0..le {
                            for f in 0..le {
                                let ab: T = (0..n).fold(T::zero(), |s, k| s + phi[e][k] * phi[f][k]);
                                let ub: T = (0..n).fold(T::zero(), |s, k| s + cols[a][k] * phi[f][k]);
                                let aw: T = (0..n).fold(T::zero(), |s, k| s + phi[e][k] * cols[b][k]);
                                let i = idx(a, e, b, f);
                                if a == b {
                                    loc_m[i] += wv * ab;
                                }
                                loc_s[i] += wv * half * (uw * ab + ub * aw);
                                loc_k[i] += wv * half * (uw * ab - ub * aw);
                            }
                        }
                    }
                }
            }
            for a in 0..n {
                for e in 0..le {
                    for b in 0..n {
                        for f in 0..le {
                            let (r, s) = (a * ne + edges[e], b * ne + edges[f]);
                            let i = idx(a, e, b, f);
                            tm.push((r, s, loc_m[i]));
                            ts.push((r, s, loc_s[i]));
                            tk.push((r, s, loc_k[i]));
                        }
                    }
                }
            }
        }
        let size = n * ne;
        let curl_row = triple_product(system.d(1), system.mass(2));
        let mut tc = Vec::new();
        for a in 0..n {
            for (i, j, &v) in curl_row.triplet_iter() {
                tc.push((a * ne + i, a * ne + j, v));
            }
        }
        Ok(Self {
            dim: n,
            n_edges: ne,
            mass: csr_from_triplets(size, size, &tm),
            sym: csr_from_triplets(size, size, &ts),
            skew: csr_from_triplets(size, size, &tk),
            curl: csr_from_triplets(size, size, &tc),
        })
    }
}
