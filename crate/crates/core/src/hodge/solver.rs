use crate::error::{Error, Result};
use crate::forms::{ConstrainedSpace, FormSystem, Side};
use crate::linalg::{
    csr_from_triplets, mul_mat, mul_vec, restrict, smallest_eigenpairs, to_dense, EigenOptions, EigenProblem, SpdFactor,
};
use crate::mesh::{BoundaryPartition, SimplicialComplex};
use crate::scalar::Real;
use crate::snf::smith_normal_form;
use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;
use std::sync::{Arc, Mutex};

/// Eigenvalues below this fraction of the largest one count as zero.
pub const KERNEL_THRESHOLD: f64 = 1e-9;

/// Operators of one degree restricted to the tangentially constrained space.
#[derive(Debug)]
pub struct DegreeData<T: Real> {
    pub space: ConstrainedSpace,
    pub mass: CsrMatrix<T>,
    pub mass_factor: SpdFactor<T>,
    /// Restricted coboundary into degree `q+1`; empty for the top degree.
    pub d: CsrMatrix<T>,
    /// `dᵀ M d` on the constrained space.
    pub stiffness: CsrMatrix<T>,
    /// Exact rank of the restricted coboundary out of this degree.
    pub rank_d: usize,
    /// Harmonic dimension from exact ranks.
    pub exact_harmonic_dim: usize,
    /// Mass-orthonormal harmonic basis (columns, free coordinates).
    pub harmonic: DMatrix<T>,
    /// Near-zero eigenvalues found by the eigen route.
    pub kernel_eigenvalues: Vec<T>,
    /// Smallest eigenvalue above the kernel threshold, if computed.
    pub first_nonzero: Option<T>,
    /// Largest eigenvalue estimate of the gauged operator.
    pub lambda_max: T,
    /// Factor of the gauged SPD operator that equals the stiffness on the
    /// complement of the kernel of `d`.
    pub gauged: SpdFactor<T>,
}

impl<T: Real> DegreeData<T> {
    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Mass-orthogonal projection of free coordinates onto the complement
    /// of the kernel of `d` within the constrained space.
    pub fn project_off_kernel(&self, x: &DMatrix<T>) -> DMatrix<T> {
        self.gauged.solve_mat(&mul_mat(&self.stiffness, x))
    }

    /// Harmonic coefficients `Hᵀ M x`.
    pub fn harmonic_coefficients(&self, x: &DVector<T>) -> DVector<T> {
        self.harmonic.transpose() * mul_vec(&self.mass, x)
    }
}

fn restrict_int(m: &CsrMatrix<i64>, rows: &[usize], cols: &[usize]) -> CsrMatrix<i64> {
    let mut col_pos = vec![usize::MAX; m.ncols()];
    for (k, &c) in cols.iter().enumerate() {
        col_pos[c] = k;
    }
    let mut coo = nalgebra_sparse::CooMatrix::new(rows.len(), cols.len());
    for (i, &r) in rows.iter().enumerate() {
        let row = m.row(r);
        for (&c, &v) in row.col_indices().iter().zip(row.values()) {
            if col_pos[c] != usize::MAX {
                coo.push(i, col_pos[c], v);
            }
        }
    }
    CsrMatrix::from(&coo)
}

/// Hodge machinery for one complex and boundary partition. Degree data is
/// assembled on first use and cached.
pub struct HodgeSolver<'a, T: Real> {
    system: FormSystem<'a, T>,
    partition: BoundaryPartition,
    spaces: Vec<ConstrainedSpace>,
    ranks: Mutex<Vec<Option<usize>>>,
    degrees: Mutex<Vec<Option<Arc<DegreeData<T>>>>>,
}

impl<'a, T: Real> HodgeSolver<'a, T> {
    pub fn new(complex: &'a SimplicialComplex<T>, partition: &BoundaryPartition) -> Result<Self> {
        partition.check(complex)?;
        let system = FormSystem::new(complex)?;
        let n = complex.dim();
        let spaces = (0..=n)
            .map(|q| ConstrainedSpace::new(partition, complex.count(q), q, Side::Tangential))
            .collect();
        Ok(Self {
            system,
            partition: partition.clone(),
            spaces,
            ranks: Mutex::new(vec![None; n]),
            degrees: Mutex::new(vec![None; n + 1]),
        })
    }

    pub fn system(&self) -> &FormSystem<'a, T> {
        &self.system
    }

    pub fn complex(&self) -> &'a SimplicialComplex<T> {
        self.system.complex()
    }

    pub fn partition(&self) -> &BoundaryPartition {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn space(&self, q: usize) -> &ConstrainedSpace {
        &self.spaces[q]
    }

    /// Exact rank of the restricted coboundary out of degree `q`.
    pub fn rank_d(&self, q: usize) -> Result<usize> {
        if q >= self.dim() {
            return Ok(0);
        }
        if let Some(r) = self.ranks.lock().unwrap()[q] {
            return Ok(r);
        }
        let m = restrict_int(
            &self.complex().incidence(q),
            self.spaces[q + 1].free(),
            self.spaces[q].free(),
        );
        let r = smith_normal_form(&m)?.rank();
        self.ranks.lock().unwrap()[q] = Some(r);
        Ok(r)
    }

    /// Harmonic dimension in degree `q` from exact integer ranks.
    pub fn exact_harmonic_dim(&self, q: usize) -> Result<usize> {
        let below = if q > 0 { self.rank_d(q - 1)? } else { 0 };
        Ok(self.spaces[q].len() - self.rank_d(q)? - below)
    }

    /// Restricted coboundary out of degree `q` (rows: degree `q+1`).
    pub fn restricted_d(&self, q: usize) -> CsrMatrix<T> {
        if q >= self.dim() {
            return csr_from_triplets(0, self.spaces[q].len(), &[]);
        }
        restrict(self.system.d(q), self.spaces[q + 1].free(), self.spaces[q].free())
    }

    pub fn restricted_mass(&self, q: usize) -> CsrMatrix<T> {
        restrict(self.system.mass(q), self.spaces[q].free(), self.spaces[q].free())
    }

    /// Cached data of degree `q`.
    pub fn degree(&self, q: usize) -> Result<Arc<DegreeData<T>>> {
        self.complex().check_degree(q)?;
        if let Some(d) = &self.degrees.lock().unwrap()[q] {
            return Ok(d.clone());
        }
        let data = Arc::new(self.build_degree(q)?);
        self.degrees.lock().unwrap()[q] = Some(data.clone());
        Ok(data)
    }

    fn build_degree(&self, q: usize) -> Result<DegreeData<T>> {
        let n = self.dim();
        let space = self.spaces[q].clone();
        let nt = space.len();
        let mass = self.restricted_mass(q);
        let mass_dense = to_dense(&mass);
        let mass_factor = SpdFactor::new(mass_dense.clone(), "restricted mass matrix")?;
        let d = self.restricted_d(q);
        let stiffness = if q < n {
            let mu = self.restricted_mass(q + 1);
            crate::linalg::triple_product(&d, &mu)
        } else {
            csr_from_triplets(nt, nt, &[])
        };
        let rank_d = self.rank_d(q)?;
        let exact_harmonic_dim = self.exact_harmonic_dim(q)?;

        // Gauge on the exact forms: M D W⁻¹ Dᵀ M with W the lumped lower mass.
        let mut op = to_dense(&stiffness);
        if q > 0 {
            let lower = &self.spaces[q - 1];
            let dl = restrict(self.system.d(q - 1), space.free(), lower.free());
            let ml = restrict(self.system.mass(q - 1), lower.free(), lower.free());
            let w: Vec<T> = (0..lower.len())
                .map(|i| ml.get_entry(i, i).map_or(T::one(), |e| e.into_value()))
                .collect();
            let md = to_dense(&(&mass * &dl));
            let mut scaled = md.clone();
            for (j, &wj) in w.iter().enumerate() {
                scaled.column_mut(j).scale_mut(T::one() / wj);
            }
            op += scaled * md.transpose();
        }
        let op = (&op + op.transpose()) * T::lit(0.5);

        if nt == 0 {
            return Ok(DegreeData {
                space,
                mass,
                mass_factor,
                d,
                stiffness,
                rank_d,
                exact_harmonic_dim,
                harmonic: DMatrix::zeros(0, 0),
                kernel_eigenvalues: vec![],
                first_nonzero: None,
                lambda_max: T::zero(),
                gauged: SpdFactor::new(DMatrix::zeros(0, 0), "gauged operator")?,
            });
        }

        // Largest eigenvalue estimate by power iteration on M⁻¹ L.
        let mut x = DVector::from_fn(nt, |i, _| T::one() + T::lit(((i * 7919) % 13) as f64 * 0.01));
        let mut lambda_max = T::zero();
        for _ in 0..40 {
            let y = mass_factor.solve(&(&op * &x));
            let num = x.dot(&(&op * &x));
            let den = x.dot(&(&mass_dense * &x));
            lambda_max = num / den;
            let nrm = y.norm();
            if nrm == T::zero() {
                break;
            }
            x = y / nrm;
        }
        if lambda_max <= T::zero() {
            lambda_max = T::one();
        }

        let tau = lambda_max * T::lit(1e-6);
        let shifted = SpdFactor::new(&op + &mass_dense * tau, "shifted gauged operator")?;
        let count = (exact_harmonic_dim + 1).min(nt);
        let mut opts = EigenOptions::new(count);
        opts.block = (count + 8).min(nt);
        opts.abs_scale = lambda_max.as_f64();
        opts.tol = T::solver_tol().as_f64();
        let a_op = |x: &DMatrix<T>| &op * x;
        let b_op = |x: &DMatrix<T>| &mass_dense * x;
        let inv = |x: &DMatrix<T>| shifted.solve_mat(x);
        let prob = EigenProblem {
            n: nt,
            apply_a: &a_op,
            apply_b: &b_op,
            apply_inv: &inv,
            project: None,
        };
        let pairs = smallest_eigenpairs(&prob, &opts)?;
        let cut = lambda_max * T::lit(KERNEL_THRESHOLD);
        let k = pairs.values.iter().filter(|&&v| v < cut).count();
        if k != exact_harmonic_dim {
            return Err(Error::TopologyMismatch {
                degree: q,
                eigen: k,
                exact: exact_harmonic_dim,
            });
        }
        let harmonic = pairs.vectors.columns(0, k).into_owned();
        let kernel_eigenvalues = pairs.values[..k].to_vec();
        let first_nonzero = pairs.values.get(k).copied();

        let mh = &mass_dense * &harmonic;
        let gauged_op = &op + &mh * mh.transpose();
        let gauged = SpdFactor::new(gauged_op, "gauged operator")?;
        Ok(DegreeData {
            space,
            mass,
            mass_factor,
            d,
            stiffness,
            rank_d,
            exact_harmonic_dim,
            harmonic,
            kernel_eigenvalues,
            first_nonzero,
            lambda_max,
            gauged,
        })
    }
}
