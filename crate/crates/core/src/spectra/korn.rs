use super::poincare::SpectralConstant;
use crate::error::{Error, Result};
use crate::forms::FormSystem;
use crate::linalg::{
    csr_from_triplets, dense_smallest_eigenpairs, mul_mat, smallest_eigenpairs, to_dense, triple_product, EigenOptions,
    EigenProblem, GramProjector, SpdFactor, DENSE_EIGEN_LIMIT,
};
use crate::mesh::{vertex_components, BoundaryPartition, SimplicialComplex, SliceSpec};
use crate::scalar::Real;
use nalgebra::DMatrix;
use nalgebra_sparse::CsrMatrix;
use serde::Serialize;

/// Admissible displacement space for a Korn constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KornVariant {
    /// Every component vanishes on `Γ_t`.
    Standard,
    /// Every component is constant on each connected part of `Γ_t` and
    /// vanishes on the first one.
    Tangential,
    /// No boundary condition; rigid motions factored out.
    Rigid,
}

#[derive(Clone, Copy, Debug)]
pub struct KornConstant<T: Real> {
    pub variant: KornVariant,
    pub constant: SpectralConstant<T>,
    pub dofs: usize,
}

impl<T: Real> KornConstant<T> {
    pub fn value(&self) -> T {
        self.constant.value
    }
}

/// Per-slice constants and their maximum.
#[derive(Clone, Debug)]
pub struct SlicedKorn<T: Real> {
    pub value: T,
    pub pieces: Vec<KornConstant<T>>,
}

/// `∫ sym∇v : sym∇w` and `∫ ∇v : ∇w` on continuous piecewise-linear
/// vector fields (DOF `component * n_vertices + vertex`), and the block mass.
pub struct VectorP1<T: Real> {
    pub sym: CsrMatrix<T>,
    pub grad: CsrMatrix<T>,
    pub mass: CsrMatrix<T>,
}

impl<T: Real> VectorP1<T> {
    pub fn assemble(complex: &SimplicialComplex<T>) -> Result<Self> {
        let n = complex.dim();
        let nv = complex.n_vertices();
        let sys = FormSystem::new(complex)?;
        let k0 = triple_product(sys.d(0), sys.mass(1));
        let m0 = sys.mass(0);
        let mut tg = Vec::new();
        let mut tm = Vec::new();
        for a in 0..n {
            for (i, j, &v) in k0.triplet_iter() {
                tg.push((a * nv + i, a * nv + j, v));
            }
            for (i, j, &v) in m0.triplet_iter() {
                tm.push((a * nv + i, a * nv + j, v));
            }
        }
        let half = T::lit(0.5);
        let mut ts = Vec::new();
        for c in 0..complex.n_cells() {
            let cell = complex.cell(c);
            let g = complex.grad_lambda(c);
            let vol = complex.volume(c);
            for (p, &vp) in cell.iter().enumerate() {
                for (r, &vr) in cell.iter().enumerate() {
                    let gp = &g[p * n..(p + 1) * n];
                    let gr = &g[r * n..(r + 1) * n];
                    let dot = gp.iter().zip(gr).fold(T::zero(), |s, (&x, &y)| s + x * y);
                    for a in 0..n {
                        for b in 0..n {
                            let mut v = gp[b] * gr[a];
                            if a == b {
                                v += dot;
                            }
                            ts.push((a * nv + vp, b * nv + vr, vol * half * v));
                        }
                    }
                }
            }
        }
        let size = n * nv;
        Ok(Self {
            sym: csr_from_triplets(size, size, &ts),
            grad: csr_from_triplets(size, size, &tg),
            mass: csr_from_triplets(size, size, &tm),
        })
    }
}

/// Smallest eigenvalue of `(K_sym, K_grad)` on the range of `basis`
/// (a sparse prolongation), optionally with a gauge and projector.
fn pencil_constant<T: Real>(
    ks: DMatrix<T>,
    kg: DMatrix<T>,
    gauge: Option<(DMatrix<T>, DMatrix<T>)>,
    projector: Option<&GramProjector<T>>,
    deflated: usize,
) -> Result<SpectralConstant<T>> {
    let n = ks.nrows();
    if n == 0 || n <= deflated {
        return Err(Error::NoInteriorDofs);
    }
    // Small pencils are solved directly: clustered spectra stall the
    // iterative solver. Gauged modes sit at eigenvalue 2, above every
    // Korn eigenvalue.
    if n <= DENSE_EIGEN_LIMIT {
        let (a, b) = match &gauge {
            Some((ga, gb)) => (&ks + ga * T::lit(2.0), &kg + gb),
            None => (ks.clone(), kg.clone()),
        };
        let pairs = dense_smallest_eigenpairs(&a, &b, 1)?;
        return SpectralConstant::from_eigen(pairs.values[0], pairs.residuals[0], pairs.iterations);
    }
    let gauge = gauge.map(|g| g.0);
    let op = match gauge {
        Some(g) => &ks + g,
        None => ks.clone(),
    };
    let factor = SpdFactor::new(op, "Korn operator")?;
    let a = |x: &DMatrix<T>| &ks * x;
    let b = |x: &DMatrix<T>| &kg * x;
    let inv = |x: &DMatrix<T>| factor.solve_mat(x);
    let proj = |x: &mut DMatrix<T>| {
        if let Some(p) = projector {
            p.apply(x)
        }
    };
    let prob = EigenProblem {
        n,
        apply_a: &a,
        apply_b: &b,
        apply_inv: &inv,
        project: projector.map(|_| &proj as &(dyn Fn(&mut DMatrix<T>) + Sync)),
    };
    let mut opts = EigenOptions::new(1);
    opts.block = 8.min(n - deflated);
    opts.tol = T::solver_tol().as_f64();
    let pairs = smallest_eigenpairs(&prob, &opts)?;
    SpectralConstant::from_eigen(pairs.values[0], pairs.residuals[0], pairs.iterations)
}

fn prolongation<T: Real>(rows: usize, columns: &[Vec<usize>]) -> CsrMatrix<T> {
    let mut t = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        for &i in col {
            t.push((i, j, T::one()));
        }
    }
    csr_from_triplets(rows, columns.len(), &t)
}

fn restricted_constant<T: Real>(ops: &VectorP1<T>, p: &CsrMatrix<T>, variant: KornVariant) -> Result<KornConstant<T>> {
    let ks = to_dense(&triple_product(p, &ops.sym));
    let kg = to_dense(&triple_product(p, &ops.grad));
    let dofs = ks.nrows();
    let constant = pencil_constant(ks, kg, None, None, 0)?;
    Ok(KornConstant {
        variant,
        constant,
        dofs,
    })
}

/// Korn constant for fields vanishing on `Γ_t` (requires `Γ_t ≠ ∅`).
pub fn korn_standard_constant<T: Real>(
    complex: &SimplicialComplex<T>,
    partition: &BoundaryPartition,
) -> Result<KornConstant<T>> {
    partition.check(complex)?;
    if partition.is_tangential_empty() {
        return korn_rigid_constant(complex);
    }
    let n = complex.dim();
    let nv = complex.n_vertices();
    let fixed = partition.closure_t(0);
    let cols: Vec<Vec<usize>> = (0..n)
        .flat_map(|a| (0..nv).filter(|&v| !fixed[v]).map(move |v| vec![a * nv + v]))
        .collect();
    if cols.is_empty() {
        return Err(Error::NoInteriorDofs);
    }
    let ops = VectorP1::assemble(complex)?;
    restricted_constant(&ops, &prolongation(n * nv, &cols), KornVariant::Standard)
}

/// Korn constant for fields whose components are constant on each
/// connected part of `Γ_t` and vanish on the first part.
pub fn korn_tangential_constant<T: Real>(
    complex: &SimplicialComplex<T>,
    partition: &BoundaryPartition,
) -> Result<KornConstant<T>> {
    partition.check(complex)?;
    if partition.is_tangential_empty() {
        return korn_rigid_constant(complex);
    }
    let n = complex.dim();
    let nv = complex.n_vertices();
    let groups = vertex_components(complex, partition.closure_t(0), partition.closure_t(1));
    let fixed = partition.closure_t(0);
    let mut cols = Vec::new();
    for a in 0..n {
        for v in (0..nv).filter(|&v| !fixed[v]) {
            cols.push(vec![a * nv + v]);
        }
        for g in groups.iter().skip(1) {
            cols.push(g.iter().map(|&v| a * nv + v).collect());
        }
    }
    if cols.is_empty() {
        return Err(Error::NoInteriorDofs);
    }
    let ops = VectorP1::assemble(complex)?;
    restricted_constant(&ops, &prolongation(n * nv, &cols), KornVariant::Tangential)
}

/// Translations and infinitesimal rotations about the centroid as columns.
pub fn rigid_modes<T: Real>(complex: &SimplicialComplex<T>) -> (DMatrix<T>, DMatrix<T>) {
    let n = complex.dim();
    let nv = complex.n_vertices();
    let mut centroid = vec![T::zero(); n];
    let vol = complex.total_volume();
    for c in 0..complex.n_cells() {
        let x = complex.centroid(n, c);
        for (m, xi) in centroid.iter_mut().zip(x) {
            *m += xi * complex.volume(c) / vol;
        }
    }
    let mut trans = DMatrix::zeros(n * nv, n);
    for a in 0..n {
        for v in 0..nv {
            trans[(a * nv + v, a)] = T::one();
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut rot = DMatrix::zeros(n * nv, pairs.len());
    for (k, &(i, j)) in pairs.iter().enumerate() {
        for v in 0..nv {
            let x = complex.vertex(v);
            rot[(i * nv + v, k)] = x[j] - centroid[j];
            rot[(j * nv + v, k)] = -(x[i] - centroid[i]);
        }
    }
    (trans, rot)
}

/// Korn constant without boundary conditions, for fields whose gradient
/// is orthogonal to constant skew matrices.
pub fn korn_rigid_constant<T: Real>(complex: &SimplicialComplex<T>) -> Result<KornConstant<T>> {
    let ops = VectorP1::assemble(complex)?;
    let ks = to_dense(&ops.sym);
    let kg = to_dense(&ops.grad);
    let (trans, rot) = rigid_modes(complex);
    let mt = mul_mat(&ops.mass, &trans);
    let kr = mul_mat(&ops.grad, &rot);
    let pt = GramProjector::new(trans.clone(), mt.clone())?;
    let pr = GramProjector::new(rot.clone(), kr.clone())?;
    // Gauges make the operator SPD; on the physical subspace they vanish.
    let gauge = pt.gauge() + pr.gauge();
    let mut basis = DMatrix::zeros(trans.nrows(), trans.ncols() + rot.ncols());
    basis.columns_mut(0, trans.ncols()).copy_from(&trans);
    basis.columns_mut(trans.ncols(), rot.ncols()).copy_from(&rot);
    let mut weighted = DMatrix::zeros(trans.nrows(), basis.ncols());
    weighted.columns_mut(0, trans.ncols()).copy_from(&mt);
    weighted.columns_mut(trans.ncols(), rot.ncols()).copy_from(&kr);
    // Translations are K-null and rotations are centred, so the two
    // orthogonality conditions decouple.
    let both = GramProjector::new(basis, weighted)?;
    let dofs = ks.nrows() - both.rank();
    let deflated = both.rank();
    let constant = pencil_constant(ks, kg, Some((gauge, pt.gauge())), Some(&both), deflated)?;
    Ok(KornConstant {
        variant: KornVariant::Rigid,
        constant,
        dofs,
    })
}

/// Restriction of a partition to a piece: `Γ_t` facets adjacent to the piece.
fn piece_partition<T: Real>(
    complex: &SimplicialComplex<T>,
    sub: &SimplicialComplex<T>,
    verts: &[usize],
    facets: &[usize],
) -> Result<BoundaryPartition> {
    let n = complex.dim();
    let mut local = Vec::with_capacity(facets.len());
    for &f in facets {
        let t: Vec<usize> = complex
            .simplex(n - 1, f)
            .iter()
            .map(|v| verts.binary_search(v).expect("vertex in piece"))
            .collect();
        local.push(sub.find(n - 1, &t).expect("facet in piece"));
    }
    BoundaryPartition::new(sub, &local)
}

/// Irrotational Korn constant: the maximum over the pieces of a slicing
/// of the tangential constant (pieces touching `Γ_t`) or the rigid one.
pub fn korn_irrotational<T: Real>(
    complex: &SimplicialComplex<T>,
    partition: &BoundaryPartition,
    slices: &SliceSpec,
) -> Result<SlicedKorn<T>> {
    partition.check(complex)?;
    let mut pieces = Vec::with_capacity(slices.len());
    for j in 0..slices.len() {
        let (sub, verts) = complex.submesh(slices.piece(j))?;
        let gt = slices.gamma_t_of_piece(complex, partition, j);
        let k = if gt.is_empty() {
            korn_rigid_constant(&sub)?
        } else {
            let p = piece_partition(complex, &sub, &verts, &gt)?;
            korn_tangential_constant(&sub, &p)?
        };
        pieces.push(k);
    }
    let value = pieces.iter().map(|k| k.value()).fold(T::zero(), |a, b| a.max(b));
    Ok(SlicedKorn { value, pieces })
}
