//! Simplicial meshes, boundary partitions and slicings.

mod admissible;
mod boundary;
mod complex;
mod generate;
mod io;
mod slice;
mod topology;

pub use admissible::{validate_admissible, AdmissibilityReport, PieceInfo, SliceSource, SlicingStatus};
pub use boundary::{tag_boundary, BoundaryPartition, Tag};
pub use complex::{local_subsets, BuildInfo, SimplexTable, SimplicialComplex, NO_CELL};
pub use generate::{annulus_mesh, box_mesh};
pub use io::{load_mesh, mesh_from_file, mesh_to_file, save_mesh, FacetTag, LoadedMesh, MeshFile};
pub use slice::{auto_slice, piece_betti1, SliceSpec};
pub use topology::{betti_numbers, cell_components, vertex_components};

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn coboundary_squares_to_zero(dim in 2usize..4, n in 1usize..4, annulus in any::<bool>()) {
            let m = if annulus && dim == 2 { annulus_mesh::<f64>(3 + n, n).unwrap() } else { box_mesh::<f64>(dim, n).unwrap() };
            for q in 0..m.dim() - 1 {
                let prod = &m.incidence(q + 1) * &m.incidence(q);
                prop_assert!(prod.values().iter().all(|&v| v == 0));
            }
        }

        #[test]
        fn positive_volumes_sum(dim in 2usize..4, n in 1usize..4) {
            let m = box_mesh::<f64>(dim, n).unwrap();
            prop_assert!((0..m.n_cells()).all(|c| m.volume(c) > 0.0));
            prop_assert!((m.total_volume() - 1.0).abs() < 1e-12);
        }
    }
}
