use super::complex::{local_subsets, SimplicialComplex};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tag of a boundary facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Tag {
    /// Tangential part `Γ_t`.
    #[serde(rename = "t")]
    Tangential,
    /// Normal part `Γ_n`.
    #[serde(rename = "n")]
    Normal,
}

/// Split of the boundary facets into `Γ_t` and `Γ_n`, with the closures
/// of both parts as simplex masks per degree.
#[derive(Clone, Debug)]
pub struct BoundaryPartition {
    complex_id: u64,
    dim: usize,
    gamma_t: Vec<usize>,
    gamma_n: Vec<usize>,
    closure_t: Vec<Vec<bool>>,
    closure_n: Vec<Vec<bool>>,
}

fn closure<T: Real>(complex: &SimplicialComplex<T>, facets: &[usize]) -> Vec<Vec<bool>> {
    let n = complex.dim();
    let mut masks: Vec<Vec<bool>> = (0..=n).map(|q| vec![false; complex.count(q)]).collect();
    for &f in facets {
        masks[n - 1][f] = true;
        let s = complex.simplex(n - 1, f);
        for q in 0..n - 1 {
            for sub in local_subsets(n, q + 1) {
                let t: Vec<usize> = sub.iter().map(|&i| s[i]).collect();
                masks[q][complex.find(q, &t).expect("face present")] = true;
            }
        }
    }
    masks
}

impl BoundaryPartition {
    /// Partition with the given boundary facets in `Γ_t`; every other
    /// boundary facet belongs to `Γ_n`.
    pub fn new<T: Real>(complex: &SimplicialComplex<T>, gamma_t: &[usize]) -> Result<Self> {
        let n = complex.dim();
        let mut t: Vec<usize> = gamma_t.to_vec();
        t.sort_unstable();
        t.dedup();
        for &f in &t {
            if f >= complex.count(n - 1) || !complex.is_boundary_facet(f) {
                return Err(Error::InvalidPartition(format!("facet {f} is not a boundary facet")));
            }
        }
        let gamma_n: Vec<usize> = complex
            .boundary_facets()
            .into_iter()
            .filter(|f| t.binary_search(f).is_err())
            .collect();
        Ok(Self {
            complex_id: complex.id(),
            dim: n,
            closure_t: closure(complex, &t),
            closure_n: closure(complex, &gamma_n),
            gamma_t: t,
            gamma_n,
        })
    }

    /// `Γ_t = Γ`.
    pub fn all_tangential<T: Real>(complex: &SimplicialComplex<T>) -> Self {
        Self::new(complex, &complex.boundary_facets()).expect("boundary facets")
    }

    /// `Γ_t = ∅`.
    pub fn all_normal<T: Real>(complex: &SimplicialComplex<T>) -> Self {
        Self::new(complex, &[]).expect("empty set")
    }

    pub fn complex_id(&self) -> u64 {
        self.complex_id
    }

    pub fn check<T: Real>(&self, complex: &SimplicialComplex<T>) -> Result<()> {
        if self.complex_id == complex.id() {
            Ok(())
        } else {
            Err(Error::ComplexMismatch)
        }
    }

    pub fn gamma_t(&self) -> &[usize] {
        &self.gamma_t
    }

    pub fn gamma_n(&self) -> &[usize] {
        &self.gamma_n
    }

    pub fn is_tangential_empty(&self) -> bool {
        self.gamma_t.is_empty()
    }

    pub fn is_tangential_full(&self) -> bool {
        self.gamma_n.is_empty()
    }

    /// Mask of q-simplices in the closure of `Γ_t`.
    pub fn closure_t(&self, q: usize) -> &[bool] {
        &self.closure_t[q]
    }

    /// Mask of q-simplices in the closure of `Γ_n`.
    pub fn closure_n(&self, q: usize) -> &[bool] {
        &self.closure_n[q]
    }

    /// (N−2)-simplices shared by a `Γ_t` facet and a `Γ_n` facet.
    pub fn interface(&self) -> Vec<usize> {
        let q = self.dim - 2;
        (0..self.closure_t[q].len())
            .filter(|&i| self.closure_t[q][i] && self.closure_n[q][i])
            .collect()
    }

    /// True when the closures of `Γ_t` and `Γ_n` meet in simplices that
    /// are not faces of the interface.
    pub fn has_coarse_contact<T: Real>(&self, complex: &SimplicialComplex<T>) -> bool {
        let q_top = self.dim - 2;
        let iface = self.interface();
        let mut covered: Vec<Vec<bool>> = (0..=q_top).map(|q| vec![false; complex.count(q)]).collect();
        for &i in &iface {
            covered[q_top][i] = true;
            let s = complex.simplex(q_top, i);
            for q in 0..q_top {
                for sub in local_subsets(q_top + 1, q + 1) {
                    let t: Vec<usize> = sub.iter().map(|&k| s[k]).collect();
                    covered[q][complex.find(q, &t).unwrap()] = true;
                }
            }
        }
        (0..=q_top)
            .any(|q| (0..covered[q].len()).any(|i| self.closure_t[q][i] && self.closure_n[q][i] && !covered[q][i]))
    }

    /// Partition with the roles of `Γ_t` and `Γ_n` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            complex_id: self.complex_id,
            dim: self.dim,
            gamma_t: self.gamma_n.clone(),
            gamma_n: self.gamma_t.clone(),
            closure_t: self.closure_n.clone(),
            closure_n: self.closure_t.clone(),
        }
    }

    /// Tag of every boundary facet, in boundary-facet order.
    pub fn tag_of(&self, facet: usize) -> Option<Tag> {
        if self.gamma_t.binary_search(&facet).is_ok() {
            Some(Tag::Tangential)
        } else if self.gamma_n.binary_search(&facet).is_ok() {
            Some(Tag::Normal)
        } else {
            None
        }
    }
}

/// Tags each boundary facet with `predicate(centroid, outward_normal)`.
pub fn tag_boundary<T: Real>(
    complex: &SimplicialComplex<T>,
    mut predicate: impl FnMut(&[T], &[T]) -> Tag,
) -> BoundaryPartition {
    let n = complex.dim();
    let t: Vec<usize> = complex
        .boundary_facets()
        .into_iter()
        .filter(|&f| predicate(&complex.centroid(n - 1, f), &complex.outward_normal(f)) == Tag::Tangential)
        .collect();
    BoundaryPartition::new(complex, &t).expect("boundary facets")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::box_mesh;

    #[test]
    fn side_selection_and_interface() {
        let m = box_mesh::<f64>(2, 4).unwrap();
        let p = tag_boundary(&m, |x, nrm| {
            if x[1] < 1e-12 && nrm[1] < -0.5 {
                Tag::Tangential
            } else {
                Tag::Normal
            }
        });
        assert_eq!(p.gamma_t().len(), 4);
        assert_eq!(p.gamma_n().len(), 12);
        assert_eq!(p.interface().len(), 2);
        assert!(!p.has_coarse_contact(&m));
        let s = p.swapped();
        assert_eq!(s.gamma_t().len(), 12);
        assert_eq!(s.interface(), p.interface());
    }

    #[test]
    fn full_and_empty() {
        let m = box_mesh::<f64>(3, 2).unwrap();
        let full = BoundaryPartition::all_tangential(&m);
        assert!(full.is_tangential_full());
        assert!(full.interface().is_empty());
        let empty = BoundaryPartition::all_normal(&m);
        assert!(empty.is_tangential_empty());
        assert!(empty.closure_t(0).iter().all(|&b| !b));
    }

    #[test]
    fn rejects_interior_facet() {
        let m = box_mesh::<f64>(2, 2).unwrap();
        let interior = (0..m.count(1)).find(|&f| !m.is_boundary_facet(f)).unwrap();
        assert!(BoundaryPartition::new(&m, &[interior]).is_err());
    }
}
