use super::boundary::BoundaryPartition;
use super::complex::SimplicialComplex;
use super::slice::{auto_slice, piece_betti1, SliceSpec};
use super::topology::betti_numbers;
use crate::error::Result;
use crate::scalar::Real;
use serde::Serialize;
use std::collections::BTreeMap;

/// Where the slicing under test comes from.
#[derive(Clone, Copy, Debug)]
pub enum SliceSource<'a> {
    Provided(&'a SliceSpec),
    Auto,
    Disabled,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PieceInfo {
    pub cells: usize,
    pub betti1: usize,
    pub gamma_t_facets: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlicingStatus {
    /// `provided`, `auto`, `trivial` or `none`.
    pub source: String,
    pub verified: bool,
    pub pieces: Vec<PieceInfo>,
}

/// Outcome of the admissibility checks on a mesh and boundary partition.
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub betti: Vec<usize>,
    pub gamma_t_facets: usize,
    pub gamma_n_facets: usize,
    pub gamma_t_components: usize,
    pub gamma_n_components: usize,
    pub interface_simplices: usize,
    /// Every boundary patch is a manifold with boundary.
    pub patches_regular: bool,
    /// The closures of `Γ_t` and `Γ_n` meet outside the interface.
    pub coarse_contact: bool,
    pub slicing: SlicingStatus,
    /// Geometric admissibility together with a verified slicing.
    pub admissible: bool,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub slices: Option<SliceSpec>,
}

/// Facets of a patch grouped by shared (N−2)-faces; also reports whether
/// every (N−2)-face is shared by at most two facets of the patch.
fn patch_structure<T: Real>(complex: &SimplicialComplex<T>, facets: &[usize]) -> (usize, bool) {
    let n = complex.dim();
    let mut ridge_to: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (k, &f) in facets.iter().enumerate() {
        let s = complex.simplex(n - 1, f);
        for skip in 0..n {
            let r: Vec<usize> = s
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            ridge_to.entry(r).or_default().push(k);
        }
    }
    let mut parent: Vec<usize> = (0..facets.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut regular = true;
    for ks in ridge_to.values() {
        if ks.len() > 2 {
            regular = false;
        }
        for w in ks.windows(2) {
            let (a, b) = (root(&mut parent, w[0]), root(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let comps = (0..facets.len()).filter(|&i| root(&mut parent, i) == i).count();
    (comps, regular)
}

/// Checks the boundary patches and the existence of a simply connected
/// slicing.
pub fn validate_admissible<T: Real>(
    complex: &SimplicialComplex<T>,
    partition: &BoundaryPartition,
    source: SliceSource<'_>,
) -> Result<AdmissibilityReport> {
    partition.check(complex)?;
    let betti = betti_numbers(complex)?;
    let (ct, rt) = patch_structure(complex, partition.gamma_t());
    let (cn, rn) = patch_structure(complex, partition.gamma_n());
    let coarse_contact = partition.has_coarse_contact(complex);
    let mut notes = Vec::new();
    if coarse_contact {
        notes.push("closures of the tangential and normal parts meet outside their common interface".into());
    }
    if !(rt && rn) {
        notes.push("a boundary patch is not a manifold with boundary".into());
    }

    let (label, spec) = match source {
        SliceSource::Provided(s) => ("provided", Some(s.clone())),
        SliceSource::Auto => ("auto", Some(auto_slice(complex)?)),
        SliceSource::Disabled if betti[1] == 0 && betti[0] == 1 => ("trivial", Some(SliceSpec::single(complex))),
        SliceSource::Disabled => ("none", None),
    };
    let mut pieces = Vec::new();
    let mut verified = spec.is_some();
    if let Some(spec) = &spec {
        for j in 0..spec.len() {
            let b1 = piece_betti1(complex, spec.piece(j))?;
            if b1 != 0 {
                verified = false;
                notes.push(format!("piece {j} has first Betti number {b1}"));
            }
            pieces.push(PieceInfo {
                cells: spec.piece(j).len(),
                betti1: b1,
                gamma_t_facets: spec.gamma_t_of_piece(complex, partition, j).len(),
            });
        }
    } else {
        notes.push("not verified sliceable".into());
    }
    Ok(AdmissibilityReport {
        betti,
        gamma_t_facets: partition.gamma_t().len(),
        gamma_n_facets: partition.gamma_n().len(),
        gamma_t_components: ct,
        gamma_n_components: cn,
        interface_simplices: partition.interface().len(),
        patches_regular: rt && rn,
        coarse_contact,
        slicing: SlicingStatus {
            source: label.into(),
            verified,
            pieces,
        },
        admissible: rt && rn && verified,
        notes,
        slices: if verified { spec } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{annulus_mesh, box_mesh, tag_boundary, Tag};

    #[test]
    fn box_with_one_side() {
        let m = box_mesh::<f64>(2, 4).unwrap();
        let p = tag_boundary(&m, |x, _| if x[1] < 1e-12 { Tag::Tangential } else { Tag::Normal });
        let r = validate_admissible(&m, &p, SliceSource::Disabled).unwrap();
        assert!(r.admissible);
        assert_eq!(r.slicing.pieces.len(), 1);
        assert_eq!(r.gamma_t_components, 1);
        assert_eq!(r.gamma_n_components, 1);
    }

    #[test]
    fn annulus_without_slicing_is_unverified() {
        let m = annulus_mesh::<f64>(16, 2).unwrap();
        let p = BoundaryPartition::all_normal(&m);
        let r = validate_admissible(&m, &p, SliceSource::Disabled).unwrap();
        assert!(!r.slicing.verified);
        assert!(r.notes.iter().any(|s| s.contains("not verified sliceable")));
        let r = validate_admissible(&m, &p, SliceSource::Auto).unwrap();
        assert!(r.slicing.verified);
        assert!(r.slicing.pieces.iter().all(|p| p.betti1 == 0));
    }
}
