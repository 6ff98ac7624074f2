use super::complex::SimplicialComplex;
use crate::error::Result;
use crate::scalar::Real;
use crate::snf::smith_normal_form;

/// Betti numbers over the rationals, computed from exact incidence ranks.
pub fn betti_numbers<T: Real>(complex: &SimplicialComplex<T>) -> Result<Vec<usize>> {
    let n = complex.dim();
    let mut ranks = vec![0usize; n + 1];
    for (q, r) in ranks.iter_mut().enumerate().take(n) {
        *r = smith_normal_form(&complex.incidence(q))?.rank();
    }
    Ok((0..=n)
        .map(|q| complex.count(q) - ranks[q] - if q > 0 { ranks[q - 1] } else { 0 })
        .collect())
}

/// Connected components of a set of cells under facet adjacency.
pub fn cell_components<T: Real>(complex: &SimplicialComplex<T>, cells: &[usize]) -> Vec<Vec<usize>> {
    let mut member = vec![usize::MAX; complex.n_cells()];
    for (k, &c) in cells.iter().enumerate() {
        member[c] = k;
    }
    let mut seen = vec![false; cells.len()];
    let mut out = Vec::new();
    for start in 0..cells.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![cells[start]];
        let mut head = 0;
        while head < comp.len() {
            let c = comp[head];
            head += 1;
            for nb in complex.cell_neighbors(c) {
                let k = member[nb];
                if k != usize::MAX && !seen[k] {
                    seen[k] = true;
                    comp.push(nb);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Connected components of the vertices in a simplex mask, joined along
/// the edges of the mask.
pub fn vertex_components<T: Real>(
    complex: &SimplicialComplex<T>,
    vertex_mask: &[bool],
    edge_mask: &[bool],
) -> Vec<Vec<usize>> {
    let nv = complex.n_vertices();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (e, &on) in edge_mask.iter().enumerate() {
        if on {
            let s = complex.simplex(1, e);
            let (a, b) = (root(&mut parent, s[0]), root(&mut parent, s[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..nv {
        if vertex_mask[v] {
            let r = root(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{annulus_mesh, box_mesh};

    #[test]
    fn betti_of_standard_meshes() {
        assert_eq!(betti_numbers(&box_mesh::<f64>(2, 3).unwrap()).unwrap(), vec![1, 0, 0]);
        assert_eq!(
            betti_numbers(&box_mesh::<f64>(3, 2).unwrap()).unwrap(),
            vec![1, 0, 0, 0]
        );
        assert_eq!(
            betti_numbers(&annulus_mesh::<f64>(8, 2).unwrap()).unwrap(),
            vec![1, 1, 0]
        );
    }
}
