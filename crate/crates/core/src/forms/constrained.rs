use super::cochain::Cochain;
use super::operators::FormSystem;
use crate::error::{Error, Result};
use crate::linalg::{bilinear, mul_tr_vec, mul_vec, restrict, to_dense, SpdFactor};
use crate::mesh::BoundaryPartition;
use crate::scalar::Real;
use nalgebra::DVector;

/// Which boundary part carries the essential condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Vanishing tangential trace on `Γ_t` (domain of `d`).
    Tangential,
    /// Vanishing normal trace on `Γ_n` (domain of the adjoint).
    Normal,
}

/// Subspace of q-cochains vanishing on the closure of one boundary part.
#[derive(Clone, Debug)]
pub struct ConstrainedSpace {
    degree: usize,
    side: Side,
    full_len: usize,
    free: Vec<usize>,
    position: Vec<usize>,
}

impl ConstrainedSpace {
    pub fn new(partition: &BoundaryPartition, full_len: usize, degree: usize, side: Side) -> Self {
        let mask = match side {
            Side::Tangential => partition.closure_t(degree),
            Side::Normal => partition.closure_n(degree),
        };
        let free: Vec<usize> = (0..full_len).filter(|&i| !mask[i]).collect();
        let mut position = vec![usize::MAX; full_len];
        for (k, &i) in free.iter().enumerate() {
            position[i] = k;
        }
        Self {
            degree,
            side,
            full_len,
            free,
            position,
        }
    }

    pub fn for_system<T: Real>(
        system: &FormSystem<'_, T>,
        partition: &BoundaryPartition,
        degree: usize,
        side: Side,
    ) -> Result<Self> {
        partition.check(system.complex())?;
        system.complex().check_degree(degree)?;
        Ok(Self::new(partition, system.complex().count(degree), degree, side))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Number of free degrees of freedom.
    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn full_len(&self) -> usize {
        self.full_len
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    /// Position of a simplex among the free DOFs.
    pub fn position(&self, i: usize) -> Option<usize> {
        let p = self.position[i];
        (p != usize::MAX).then_some(p)
    }

    /// Extends free values by zero.
    pub fn prolong<T: Real>(&self, x: &DVector<T>) -> DVector<T> {
        let mut y = DVector::zeros(self.full_len);
        for (k, &i) in self.free.iter().enumerate() {
            y[i] = x[k];
        }
        y
    }

    /// Free values of a full vector.
    pub fn restrict<T: Real>(&self, y: &DVector<T>) -> DVector<T> {
        DVector::from_iterator(self.free.len(), self.free.iter().map(|&i| y[i]))
    }

    /// Largest magnitude on constrained simplices.
    pub fn violation<T: Real>(&self, y: &DVector<T>) -> T {
        (0..self.full_len)
            .filter(|&i| self.position[i] == usize::MAX)
            .fold(T::zero(), |m, i| m.max(y[i].abs()))
    }
}

/// `⟨u, v⟩` in the Whitney L² inner product.
pub fn l2_inner<T: Real>(system: &FormSystem<'_, T>, u: &Cochain<T>, v: &Cochain<T>) -> Result<T> {
    u.check_compatible(v)?;
    system.check(u)?;
    Ok(bilinear(system.mass(u.degree()), u.values(), v.values()))
}

pub fn l2_norm<T: Real>(system: &FormSystem<'_, T>, u: &Cochain<T>) -> Result<T> {
    Ok(l2_inner(system, u, u)?.max(T::zero()).sqrt())
}

/// Weak codifferential on the full space: `M_{q-1} y = dᵀ M_q h`.
pub fn weak_codifferential<T: Real>(system: &FormSystem<'_, T>, h: &Cochain<T>) -> Result<Cochain<T>> {
    system.check(h)?;
    let q = h.degree();
    if q == 0 {
        return Err(Error::DegreeOutOfRange {
            degree: 0,
            dim: system.dim(),
        });
    }
    let rhs = mul_tr_vec(system.d(q - 1), &mul_vec(system.mass(q), h.values()));
    let y = system.mass_factor(q - 1)?.solve(&rhs);
    Ok(Cochain::raw(h.complex_id(), q - 1, y))
}

/// Weak codifferential relative to the tangentially constrained spaces:
/// the unique `y ∈ V^{q-1}_t` with `⟨y, w⟩ = ⟨h, d w⟩` for all `w ∈ V^{q-1}_t`.
pub fn weak_codifferential_constrained<T: Real>(
    system: &FormSystem<'_, T>,
    partition: &BoundaryPartition,
    h: &Cochain<T>,
) -> Result<Cochain<T>> {
    system.check(h)?;
    let q = h.degree();
    if q == 0 {
        return Err(Error::DegreeOutOfRange {
            degree: 0,
            dim: system.dim(),
        });
    }
    let lower = ConstrainedSpace::for_system(system, partition, q - 1, Side::Tangential)?;
    let rhs_full = mul_tr_vec(system.d(q - 1), &mul_vec(system.mass(q), h.values()));
    let rhs = lower.restrict(&rhs_full);
    let mtt = restrict(system.mass(q - 1), lower.free(), lower.free());
    let f = SpdFactor::new(to_dense(&mtt), "restricted mass matrix")?;
    Ok(Cochain::raw(h.complex_id(), q - 1, lower.prolong(&f.solve(&rhs))))
}
