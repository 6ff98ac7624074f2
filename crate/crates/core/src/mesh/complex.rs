use crate::error::{Error, Result};
use crate::linalg::csr_from_triplets;
use crate::scalar::Real;
use nalgebra::DMatrix;
use nalgebra_sparse::CsrMatrix;
use std::sync::atomic::{AtomicU64, Ordering};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Marker for a facet without a second cell.
pub const NO_CELL: usize = usize::MAX;

/// Simplices of one dimension as sorted vertex tuples in lexicographic order.
#[derive(Clone, Debug)]
pub struct SimplexTable {
    width: usize,
    verts: Vec<usize>,
}

impl SimplexTable {
    fn from_sorted(width: usize, mut tuples: Vec<Vec<usize>>) -> Self {
        tuples.sort_unstable();
        tuples.dedup();
        Self {
            width,
            verts: tuples.into_iter().flatten().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.verts.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.verts[i * self.width..(i + 1) * self.width]
    }

    /// Index of a sorted tuple.
    pub fn find(&self, tuple: &[usize]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(tuple) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.verts.chunks(self.width)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn local_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Oriented simplicial N-complex with cached cell geometry.
///
/// Every simplex is stored as a sorted vertex tuple. Cells additionally
/// carry a sign so that the oriented cell has positive volume.
#[derive(Clone, Debug)]
pub struct SimplicialComplex<T: Real> {
    id: u64,
    dim: usize,
    coords: Vec<T>,
    tables: Vec<SimplexTable>,
    cell_sign: Vec<i8>,
    facet_cells: Vec<[usize; 2]>,
    volumes: Vec<T>,
    grads: Vec<T>,
}

/// Result of building a complex from raw cells.
#[derive(Clone, Debug)]
pub struct BuildInfo {
    /// Canonical index of each input cell.
    pub input_to_canonical: Vec<usize>,
    /// Input cells whose given vertex order had negative volume.
    pub reoriented: Vec<usize>,
}

fn permutation_parity(v: &[usize]) -> i8 {
    let mut sign = 1i8;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                sign = -sign;
            }
        }
    }
    sign
}

impl<T: Real> SimplicialComplex<T> {
    /// Builds a complex from vertex coordinates (flat, `dim` per vertex)
    /// and cells given as `dim + 1` vertex indices in any order.
    pub fn from_cells(dim: usize, coords: Vec<T>, cells: &[Vec<usize>]) -> Result<(Self, BuildInfo)> {
        if !(2..=4).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidMesh(
                "coordinate array length is not a multiple of the dimension".into(),
            ));
        }
        let nv = coords.len() / dim;
        if cells.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        let mut used = vec![false; nv];
        let mut sorted_cells = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() != dim + 1 {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} has {} vertices, expected {}",
                    cell.len(),
                    dim + 1
                )));
            }
            if let Some(&v) = cell.iter().find(|&&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("cell {c} references vertex {v} of {nv}")));
            }
            let mut s = cell.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMesh(format!("cell {c} repeats a vertex")));
            }
            for &v in &s {
                used[v] = true;
            }
            sorted_cells.push((s, c, permutation_parity(cell)));
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("vertex {v} is not used by any cell")));
        }
        sorted_cells.sort();
        if sorted_cells.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMesh("duplicate cell".into()));
        }

        let mut input_to_canonical = vec![0; cells.len()];
        let mut reoriented = Vec::new();
        let ncell = sorted_cells.len();
        let mut cell_sign = Vec::with_capacity(ncell);
        let mut volumes = Vec::with_capacity(ncell);
        let mut grads = Vec::with_capacity(ncell * (dim + 1) * dim);
        let fact: f64 = (1..=dim).map(|k| k as f64).product();
        for (k, (s, c, parity)) in sorted_cells.iter().enumerate() {
            input_to_canonical[*c] = k;
            let p0 = &coords[s[0] * dim..(s[0] + 1) * dim];
            let jac = DMatrix::from_fn(dim, dim, |r, col| coords[s[col + 1] * dim + r] - p0[r]);
            let det = jac.determinant();
            let mut h = T::zero();
            for a in 0..=dim {
                for b in a + 1..=dim {
                    let mut l2 = T::zero();
                    for r in 0..dim {
                        let d = coords[s[a] * dim + r] - coords[s[b] * dim + r];
                        l2 += d * d;
                    }
                    h = h.max(l2.sqrt());
                }
            }
            let vol = det / T::lit(fact);
            if vol.abs() <= T::lit(1e-12) * h.powi(dim as i32) {
                return Err(Error::DegenerateCell {
                    cell: *c,
                    volume: vol.as_f64(),
                });
            }
            let sign: i8 = if vol > T::zero() { 1 } else { -1 };
            if sign * parity < 0 {
                reoriented.push(*c);
            }
            cell_sign.push(sign);
            volumes.push(vol.abs());
            let inv = jac.try_inverse().ok_or(Error::DegenerateCell {
                cell: *c,
                volume: vol.as_f64(),
            })?;
            let mut g0 = vec![T::zero(); dim];
            let mut gi = Vec::with_capacity(dim * dim);
            for i in 0..dim {
                for r in 0..dim {
                    let v = inv[(i, r)];
                    gi.push(v);
                    g0[r] -= v;
                }
            }
            grads.extend(g0);
            grads.extend(gi);
        }
        reoriented.sort_unstable();

        let mut tables = Vec::with_capacity(dim + 1);
        for q in 0..dim {
            let mut faces = Vec::new();
            let subsets = local_subsets(dim + 1, q + 1);
            for (s, _, _) in &sorted_cells {
                for sub in &subsets {
                    faces.push(sub.iter().map(|&i| s[i]).collect::<Vec<_>>());
                }
            }
            tables.push(SimplexTable::from_sorted(q + 1, faces));
        }
        tables.push(SimplexTable::from_sorted(
            dim + 1,
            sorted_cells.iter().map(|(s, _, _)| s.clone()).collect(),
        ));

        let nf = tables[dim - 1].len();
        let mut facet_cells = vec![[NO_CELL, NO_CELL]; nf];
        for (k, (s, _, _)) in sorted_cells.iter().enumerate() {
            for skip in 0..=dim {
                let f: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let fi = tables[dim - 1].find(&f).expect("facet present");
                let slot = &mut facet_cells[fi];
                if slot[0] == NO_CELL {
                    slot[0] = k;
                } else if slot[1] == NO_CELL {
                    slot[1] = k;
                } else {
                    return Err(Error::InvalidMesh(format!(
                        "facet {f:?} is shared by more than two cells"
                    )));
                }
            }
        }

        let complex = Self {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            dim,
            coords,
            tables,
            cell_sign,
            facet_cells,
            volumes,
            grads,
        };
        Ok((
            complex,
            BuildInfo {
                input_to_canonical,
                reoriented,
            },
        ))
    }

    /// Identity used to check that objects refer to the same complex.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.tables[0].len()
    }

    pub fn n_cells(&self) -> usize {
        self.tables[self.dim].len()
    }

    /// Number of q-simplices.
    pub fn count(&self, q: usize) -> usize {
        self.tables.get(q).map_or(0, SimplexTable::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.tables.iter().map(SimplexTable::len).collect()
    }

    pub fn simplices(&self, q: usize) -> &SimplexTable {
        &self.tables[q]
    }

    pub fn simplex(&self, q: usize, i: usize) -> &[usize] {
        self.tables[q].get(i)
    }

    pub fn find(&self, q: usize, tuple: &[usize]) -> Option<usize> {
        self.tables.get(q)?.find(tuple)
    }

    pub fn check_degree(&self, q: usize) -> Result<()> {
        if q > self.dim {
            Err(Error::DegreeOutOfRange {
                degree: q,
                dim: self.dim,
            })
        } else {
            Ok(())
        }
    }

    pub fn vertex(&self, v: usize) -> &[T] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        self.tables[self.dim].get(c)
    }

    /// Orientation sign of the sorted vertex order of a cell.
    pub fn cell_sign(&self, c: usize) -> i8 {
        self.cell_sign[c]
    }

    pub fn volume(&self, c: usize) -> T {
        self.volumes[c]
    }

    pub fn total_volume(&self) -> T {
        self.volumes.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Gradients of the barycentric coordinates of cell `c`, one row of
    /// length `dim` per local vertex (sorted order).
    pub fn grad_lambda(&self, c: usize) -> &[T] {
        let w = (self.dim + 1) * self.dim;
        &self.grads[c * w..(c + 1) * w]
    }

    /// Point with the given barycentric coordinates in cell `c`.
    pub fn point(&self, c: usize, bary: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.dim];
        for (&v, &l) in self.cell(c).iter().zip(bary) {
            for (xi, &p) in x.iter_mut().zip(self.vertex(v)) {
                *xi += l * p;
            }
        }
        x
    }

    pub fn centroid(&self, q: usize, i: usize) -> Vec<T> {
        let s = self.simplex(q, i);
        let w = T::one() / T::from_count(s.len());
        let mut x = vec![T::zero(); self.dim];
        for &v in s {
            for (xi, &p) in x.iter_mut().zip(self.vertex(v)) {
                *xi += w * p;
            }
        }
        x
    }

    /// Cells adjacent to a facet; the second entry is [`NO_CELL`] on the boundary.
    pub fn facet_cells(&self, f: usize) -> [usize; 2] {
        self.facet_cells[f]
    }

    pub fn is_boundary_facet(&self, f: usize) -> bool {
        self.facet_cells[f][1] == NO_CELL
    }

    pub fn boundary_facets(&self) -> Vec<usize> {
        (0..self.count(self.dim - 1))
            .filter(|&f| self.is_boundary_facet(f))
            .collect()
    }

    /// Indices of the q-faces of a cell, in local lexicographic order.
    pub fn cell_faces(&self, c: usize, q: usize) -> Vec<usize> {
        let cell = self.cell(c);
        local_subsets(self.dim + 1, q + 1)
            .into_iter()
            .map(|sub| {
                let t: Vec<usize> = sub.iter().map(|&i| cell[i]).collect();
                self.tables[q].find(&t).expect("face present")
            })
            .collect()
    }

    /// Outward unit normal of a boundary facet.
    pub fn outward_normal(&self, f: usize) -> Vec<T> {
        let c = self.facet_cells[f][0];
        let facet = self.simplex(self.dim - 1, f);
        let cell = self.cell(c);
        let opp = cell.iter().position(|v| !facet.contains(v)).expect("opposite vertex");
        let g = &self.grad_lambda(c)[opp * self.dim..(opp + 1) * self.dim];
        let norm = g.iter().fold(T::zero(), |a, &b| a + b * b).sqrt();
        g.iter().map(|&x| -x / norm).collect()
    }

    /// Largest edge length.
    pub fn mesh_size(&self) -> T {
        let mut h = T::zero();
        for e in self.tables[1].iter() {
            let (a, b) = (self.vertex(e[0]), self.vertex(e[1]));
            let l = a
                .iter()
                .zip(b)
                .fold(T::zero(), |s, (&x, &y)| s + (x - y) * (x - y))
                .sqrt();
            h = h.max(l);
        }
        h
    }

    /// Signed incidence matrix of the coboundary `C^q → C^{q+1}`
    /// (rows: (q+1)-simplices, columns: q-simplices).
    pub fn incidence(&self, q: usize) -> CsrMatrix<i64> {
        assert!(q < self.dim, "no coboundary out of top degree");
        let rows = &self.tables[q + 1];
        let mut triplets = Vec::with_capacity(rows.len() * (q + 2));
        for (r, s) in rows.iter().enumerate() {
            let orient = if q + 1 == self.dim { self.cell_sign[r] as i64 } else { 1 };
            for skip in 0..=q + 1 {
                let face: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let col = self.tables[q].find(&face).expect("face present");
                let sign = if skip % 2 == 0 { 1 } else { -1 };
                triplets.push((r, col, sign * orient));
            }
        }
        let mut coo = nalgebra_sparse::CooMatrix::new(rows.len(), self.tables[q].len());
        for (i, j, v) in triplets {
            coo.push(i, j, v);
        }
        CsrMatrix::from(&coo)
    }

    /// Incidence converted to the scalar type.
    pub fn incidence_real(&self, q: usize) -> CsrMatrix<T> {
        let m = self.incidence(q);
        let triplets: Vec<(usize, usize, T)> = m.triplet_iter().map(|(i, j, &v)| (i, j, T::lit(v as f64))).collect();
        csr_from_triplets(m.nrows(), m.ncols(), &triplets)
    }

    /// Cells sharing a facet with `c`.
    pub fn cell_neighbors(&self, c: usize) -> Vec<usize> {
        let cell = self.cell(c);
        let mut out = Vec::new();
        for skip in 0..=self.dim {
            let f: Vec<usize> = cell
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            let fi = self.tables[self.dim - 1].find(&f).expect("facet present");
            let [a, b] = self.facet_cells[fi];
            let other = if a == c { b } else { a };
            if other != NO_CELL {
                out.push(other);
            }
        }
        out
    }

    /// Complex built from a subset of cells; returns it with the map from
    /// new vertex indices to old ones. Cell order follows the canonical
    /// order of the subset.
    pub fn submesh(&self, cells: &[usize]) -> Result<(Self, Vec<usize>)> {
        let mut verts: Vec<usize> = cells.iter().flat_map(|&c| self.cell(c).iter().copied()).collect();
        verts.sort_unstable();
        verts.dedup();
        let coords: Vec<T> = verts.iter().flat_map(|&v| self.vertex(v).iter().copied()).collect();
        let local: Vec<Vec<usize>> = cells
            .iter()
            .map(|&c| self.cell(c).iter().map(|v| verts.binary_search(v).unwrap()).collect())
            .collect();
        let (sub, _) = Self::from_cells(self.dim, coords, &local)?;
        Ok((sub, verts))
    }

    /// Same complex with coordinates converted to another scalar type.
    pub fn cast<U: Real>(&self) -> SimplicialComplex<U> {
        let coords = self.coords.iter().map(|&x| U::lit(x.as_f64())).collect();
        let cells: Vec<Vec<usize>> = (0..self.n_cells()).map(|c| self.cell(c).to_vec()).collect();
        SimplicialComplex::from_cells(self.dim, coords, &cells)
            .expect("valid complex")
            .0
    }
}
