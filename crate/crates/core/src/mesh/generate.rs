use super::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Kuhn triangulation of the unit cube `[0,1]^dim` with `n` intervals per
/// axis: `dim! · n^dim` simplices.
pub fn box_mesh<T: Real>(dim: usize, n: usize) -> Result<SimplicialComplex<T>> {
    if !(2..=3).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    if n == 0 {
        return Err(Error::InvalidResolution("box resolution must be at least 1".into()));
    }
    let side = n + 1;
    let nv = side.pow(dim as u32);
    let mut coords = Vec::with_capacity(nv * dim);
    for v in 0..nv {
        let mut r = v;
        for _ in 0..dim {
            coords.push(T::from_count(r % side) / T::from_count(n));
            r /= side;
        }
    }
    let stride: Vec<usize> = (0..dim).map(|k| side.pow(k as u32)).collect();
    let perms = permutations(dim);
    let mut cells = Vec::with_capacity(perms.len() * n.pow(dim as u32));
    for cube in 0..n.pow(dim as u32) {
        let mut r = cube;
        let mut base = 0;
        for &s in &stride {
            base += (r % n) * s;
            r /= n;
        }
        for p in &perms {
            let mut v = base;
            let mut cell = vec![v];
            for &axis in p {
                v += stride[axis];
                cell.push(v);
            }
            cells.push(cell);
        }
    }
    Ok(SimplicialComplex::from_cells(dim, coords, &cells)?.0)
}

/// Triangulated annulus with radii 1/2 and 1: `n_angular` sectors,
/// `n_radial` rings, each quadrilateral split into two triangles.
pub fn annulus_mesh<T: Real>(n_angular: usize, n_radial: usize) -> Result<SimplicialComplex<T>> {
    if n_angular < 3 || n_radial == 0 {
        return Err(Error::InvalidResolution(
            "annulus needs at least 3 angular and 1 radial subdivision".into(),
        ));
    }
    let mut coords = Vec::with_capacity(2 * n_angular * (n_radial + 1));
    for j in 0..=n_radial {
        let r = 0.5 + 0.5 * j as f64 / n_radial as f64;
        for k in 0..n_angular {
            let t = std::f64::consts::TAU * k as f64 / n_angular as f64;
            coords.push(T::lit(r * t.cos()));
            coords.push(T::lit(r * t.sin()));
        }
    }
    let idx = |j: usize, k: usize| j * n_angular + k % n_angular;
    let mut cells = Vec::with_capacity(2 * n_angular * n_radial);
    for j in 0..n_radial {
        for k in 0..n_angular {
            let (a, b, c, d) = (idx(j, k), idx(j, k + 1), idx(j + 1, k), idx(j + 1, k + 1));
            cells.push(vec![a, b, d]);
            cells.push(vec![a, d, c]);
        }
    }
    Ok(SimplicialComplex::from_cells(2, coords, &cells)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_counts_and_volume() {
        let m = box_mesh::<f64>(2, 3).unwrap();
        assert_eq!(m.n_cells(), 18);
        assert_eq!(m.counts(), vec![16, 33, 18]);
        assert!((m.total_volume() - 1.0).abs() < 1e-14);
        let m = box_mesh::<f64>(3, 2).unwrap();
        assert_eq!(m.n_cells(), 48);
        assert!((m.total_volume() - 1.0).abs() < 1e-14);
        let c = m.counts();
        assert_eq!(c[0] as i64 - c[1] as i64 + c[2] as i64 - c[3] as i64, 1);
    }

    #[test]
    fn annulus_counts() {
        let m = annulus_mesh::<f64>(16, 2).unwrap();
        assert_eq!(m.n_cells(), 64);
        let c = m.counts();
        assert_eq!(c[0] as i64 - c[1] as i64 + c[2] as i64, 0);
        assert_eq!(m.boundary_facets().len(), 32);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(box_mesh::<f64>(5, 2), Err(Error::UnsupportedDimension(5))));
        assert!(matches!(box_mesh::<f64>(2, 0), Err(Error::InvalidResolution(_))));
        assert!(annulus_mesh::<f64>(2, 1).is_err());
    }
}
