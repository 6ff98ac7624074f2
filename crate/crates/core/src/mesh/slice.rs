use super::boundary::BoundaryPartition;
use super::complex::SimplicialComplex;
use super::topology::{betti_numbers, cell_components};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Partition of the cells into facet-connected pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceSpec {
    pieces: Vec<Vec<usize>>,
}

impl SliceSpec {
    /// Validates that the pieces are nonempty, disjoint, facet-connected
    /// and cover every cell.
    pub fn new<T: Real>(complex: &SimplicialComplex<T>, pieces: Vec<Vec<usize>>) -> Result<Self> {
        let n = complex.n_cells();
        let mut owner = vec![usize::MAX; n];
        let mut sorted = Vec::with_capacity(pieces.len());
        for (j, mut piece) in pieces.into_iter().enumerate() {
            if piece.is_empty() {
                return Err(Error::InvalidSlicing(format!("piece {j} is empty")));
            }
            piece.sort_unstable();
            for &c in &piece {
                if c >= n {
                    return Err(Error::InvalidSlicing(format!("piece {j} references cell {c} of {n}")));
                }
                if owner[c] != usize::MAX {
                    return Err(Error::InvalidSlicing(format!(
                        "cell {c} belongs to pieces {} and {j}",
                        owner[c]
                    )));
                }
                owner[c] = j;
            }
            if cell_components(complex, &piece).len() != 1 {
                return Err(Error::InvalidSlicing(format!("piece {j} is not facet-connected")));
            }
            sorted.push(piece);
        }
        if let Some(c) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidSlicing(format!("cell {c} is not covered")));
        }
        Ok(Self { pieces: sorted })
    }

    /// One piece holding every cell.
    pub fn single<T: Real>(complex: &SimplicialComplex<T>) -> Self {
        Self {
            pieces: vec![(0..complex.n_cells()).collect()],
        }
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn pieces(&self) -> &[Vec<usize>] {
        &self.pieces
    }

    pub fn piece(&self, j: usize) -> &[usize] {
        &self.pieces[j]
    }

    /// Boundary facets of `Γ_t` adjacent to piece `j`.
    pub fn gamma_t_of_piece<T: Real>(
        &self,
        complex: &SimplicialComplex<T>,
        partition: &BoundaryPartition,
        j: usize,
    ) -> Vec<usize> {
        partition
            .gamma_t()
            .iter()
            .copied()
            .filter(|&f| self.pieces[j].binary_search(&complex.facet_cells(f)[0]).is_ok())
            .collect()
    }
}

/// First Betti number of the subcomplex spanned by some cells.
pub fn piece_betti1<T: Real>(complex: &SimplicialComplex<T>, cells: &[usize]) -> Result<usize> {
    let (sub, _) = complex.submesh(cells)?;
    Ok(betti_numbers(&sub)?[1])
}

fn bfs_order<T: Real>(complex: &SimplicialComplex<T>, cells: &[usize], start: usize) -> Vec<usize> {
    let mut inside = vec![false; complex.n_cells()];
    for &c in cells {
        inside[c] = true;
    }
    let mut seen = vec![false; complex.n_cells()];
    seen[start] = true;
    let mut order = vec![start];
    let mut head = 0;
    while head < order.len() {
        let c = order[head];
        head += 1;
        for nb in complex.cell_neighbors(c) {
            if inside[nb] && !seen[nb] {
                seen[nb] = true;
                order.push(nb);
            }
        }
    }
    order
}

/// Heuristic slicing: pieces with nonzero first Betti number are split
/// along a breadth-first order of the dual graph until every piece is
/// simply connected in homology.
pub fn auto_slice<T: Real>(complex: &SimplicialComplex<T>) -> Result<SliceSpec> {
    let all: Vec<usize> = (0..complex.n_cells()).collect();
    let mut queue = cell_components(complex, &all);
    let mut done = Vec::new();
    let mut budget = 4 * complex.n_cells() + 16;
    while let Some(piece) = queue.pop() {
        budget = budget
            .checked_sub(1)
            .ok_or_else(|| Error::InvalidSlicing("automatic slicing did not terminate".into()))?;
        if piece_betti1(complex, &piece)? == 0 {
            done.push(piece);
            continue;
        }
        // Start from a peripheral cell so the halves are elongated.
        let first = bfs_order(complex, &piece, piece[0]);
        let far = *first.last().unwrap();
        let order = bfs_order(complex, &piece, far);
        let half = order.len() / 2;
        let mut head = order[..half].to_vec();
        head.sort_unstable();
        queue.push(head);
        let tail = order[half..].to_vec();
        queue.extend(cell_components(complex, &tail));
    }
    done.sort();
    SliceSpec::new(complex, done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{annulus_mesh, box_mesh};

    #[test]
    fn validation_errors() {
        let m = box_mesh::<f64>(2, 2).unwrap();
        assert!(SliceSpec::new(&m, vec![(0..7).collect()]).is_err());
        assert!(SliceSpec::new(&m, vec![(0..8).collect(), vec![0]]).is_err());
        assert!(SliceSpec::new(&m, vec![(0..8).collect(), vec![]]).is_err());
        assert!(SliceSpec::new(&m, vec![(0..8).collect()]).is_ok());
    }

    #[test]
    fn annulus_is_cut_into_simply_connected_pieces() {
        let m = annulus_mesh::<f64>(16, 2).unwrap();
        let s = auto_slice(&m).unwrap();
        assert!(s.len() >= 2);
        for p in s.pieces() {
            assert_eq!(piece_betti1(&m, p).unwrap(), 0);
        }
    }

    #[test]
    fn box_needs_one_piece() {
        let m = box_mesh::<f64>(2, 3).unwrap();
        assert_eq!(auto_slice(&m).unwrap().len(), 1);
    }
}
