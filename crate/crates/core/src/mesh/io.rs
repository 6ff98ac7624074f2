use super::boundary::{BoundaryPartition, Tag};
use super::complex::SimplicialComplex;
use super::slice::SliceSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetTag {
    pub facet: Vec<usize>,
    pub tag: Tag,
}

/// On-disk mesh representation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    pub cells: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_tags: Option<Vec<FacetTag>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slices: Option<Vec<Vec<usize>>>,
}

/// A mesh read from disk together with its optional annotations.
#[derive(Clone, Debug)]
pub struct LoadedMesh<T: Real> {
    pub complex: SimplicialComplex<T>,
    pub partition: Option<BoundaryPartition>,
    pub slices: Option<SliceSpec>,
    /// Input cells whose vertex order was reversed to obtain positive volume.
    pub reoriented: Vec<usize>,
}

fn parse_err(locus: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        locus: locus.into(),
        message: message.into(),
    }
}

/// Parses mesh JSON. Cell indices in `slices` refer to the order of `cells`.
pub fn load_mesh<T: Real>(text: &str) -> Result<LoadedMesh<T>> {
    let file: MeshFile = serde_json::from_str(text)
        .map_err(|e| parse_err(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    mesh_from_file(&file)
}

pub fn mesh_from_file<T: Real>(file: &MeshFile) -> Result<LoadedMesh<T>> {
    let dim = file.dimension;
    if !(2..=4).contains(&dim) {
        return Err(parse_err("dimension", format!("unsupported dimension {dim}")));
    }
    let mut coords = Vec::with_capacity(file.vertices.len() * dim);
    for (i, v) in file.vertices.iter().enumerate() {
        if v.len() != dim {
            return Err(parse_err(
                format!("vertices[{i}]"),
                format!("expected {dim} coordinates, found {}", v.len()),
            ));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(format!("vertices[{i}]"), "non-finite coordinate"));
        }
        coords.extend(v.iter().map(|&x| T::lit(x)));
    }
    for (c, cell) in file.cells.iter().enumerate() {
        if cell.len() != dim + 1 {
            return Err(parse_err(
                format!("cells[{c}]"),
                format!("expected {} vertices, found {}", dim + 1, cell.len()),
            ));
        }
        if let Some(j) = cell.iter().position(|&v| v >= file.vertices.len()) {
            return Err(parse_err(
                format!("cells[{c}][{j}]"),
                format!("vertex index {} out of range", cell[j]),
            ));
        }
    }
    let (complex, info) = SimplicialComplex::from_cells(dim, coords, &file.cells).map_err(|e| match e {
        Error::DegenerateCell { cell, volume } => {
            parse_err(format!("cells[{cell}]"), format!("degenerate cell (volume {volume:e})"))
        }
        other => parse_err("cells", other.to_string()),
    })?;

    let partition = match &file.boundary_tags {
        None => None,
        Some(tags) => {
            let mut gamma_t = Vec::new();
            for (k, t) in tags.iter().enumerate() {
                let mut f = t.facet.clone();
                f.sort_unstable();
                let idx = complex
                    .find(dim - 1, &f)
                    .filter(|&i| f.len() == dim && complex.is_boundary_facet(i))
                    .ok_or_else(|| {
                        parse_err(format!("boundary_tags[{k}].facet"), "not a boundary facet of the mesh")
                    })?;
                if t.tag == Tag::Tangential {
                    gamma_t.push(idx);
                }
            }
            Some(BoundaryPartition::new(&complex, &gamma_t)?)
        }
    };

    let slices = match &file.slices {
        None => None,
        Some(pieces) => {
            let mut mapped = Vec::with_capacity(pieces.len());
            for (j, p) in pieces.iter().enumerate() {
                let mut q = Vec::with_capacity(p.len());
                for (k, &c) in p.iter().enumerate() {
                    let &canon = info.input_to_canonical.get(c).ok_or_else(|| {
                        parse_err(format!("slices[{j}][{k}]"), format!("cell index {c} out of range"))
                    })?;
                    q.push(canon);
                }
                mapped.push(q);
            }
            Some(SliceSpec::new(&complex, mapped).map_err(|e| parse_err("slices", e.to_string()))?)
        }
    };

    Ok(LoadedMesh {
        complex,
        partition,
        slices,
        reoriented: info.reoriented,
    })
}

/// Canonical file form: cells in canonical order, each listed with
/// positive orientation; every boundary facet tagged when a partition is given.
pub fn mesh_to_file<T: Real>(
    complex: &SimplicialComplex<T>,
    partition: Option<&BoundaryPartition>,
    slices: Option<&SliceSpec>,
) -> MeshFile {
    let dim = complex.dim();
    let vertices = (0..complex.n_vertices())
        .map(|v| complex.vertex(v).iter().map(|x| x.as_f64()).collect())
        .collect();
    let cells = (0..complex.n_cells())
        .map(|c| {
            let mut cell = complex.cell(c).to_vec();
            if complex.cell_sign(c) < 0 {
                cell.swap(dim - 1, dim);
            }
            cell
        })
        .collect();
    let boundary_tags = partition.map(|p| {
        complex
            .boundary_facets()
            .into_iter()
            .map(|f| FacetTag {
                facet: complex.simplex(dim - 1, f).to_vec(),
                tag: p.tag_of(f).unwrap_or(Tag::Normal),
            })
            .collect()
    });
    MeshFile {
        dimension: dim,
        vertices,
        cells,
        boundary_tags,
        slices: slices.map(|s| s.pieces().to_vec()),
    }
}

pub fn save_mesh<T: Real>(
    complex: &SimplicialComplex<T>,
    partition: Option<&BoundaryPartition>,
    slices: Option<&SliceSpec>,
) -> String {
    serde_json::to_string_pretty(&mesh_to_file(complex, partition, slices)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{annulus_mesh, auto_slice, box_mesh, tag_boundary};

    #[test]
    fn round_trip_preserves_structure() {
        let m = annulus_mesh::<f64>(8, 2).unwrap();
        let p = tag_boundary(&m, |x, _| if x[0] > 0.0 { Tag::Tangential } else { Tag::Normal });
        let s = auto_slice(&m).unwrap();
        let text = save_mesh(&m, Some(&p), Some(&s));
        let back = load_mesh::<f64>(&text).unwrap();
        assert_eq!(back.complex.counts(), m.counts());
        assert!(back.reoriented.is_empty());
        assert_eq!(back.partition.unwrap().gamma_t(), p.gamma_t());
        assert_eq!(back.slices.unwrap(), s);
        for q in 0..2 {
            assert_eq!(back.complex.incidence(q).values(), m.incidence(q).values());
        }
    }

    #[test]
    fn reversed_cell_is_repaired_and_flagged() {
        let text = r#"{"dimension":2,"vertices":[[0,0],[1,0],[0,1]],"cells":[[0,2,1]]}"#;
        let m = load_mesh::<f64>(text).unwrap();
        assert_eq!(m.reoriented, vec![0]);
        assert!((m.complex.volume(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_locus() {
        let bad = r#"{"dimension":2,"vertices":[[0,0],[1,0],[0,1]],"cells":[[0,1,7]]}"#;
        match load_mesh::<f64>(bad) {
            Err(Error::Parse { locus, .. }) => assert_eq!(locus, "cells[0][2]"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = "{\"dimension\":2,\n\"vertices\":[[0,0],[1,0]],\n\"cells\":[[0,1,2]],\"oops\":1}";
        match load_mesh::<f64>(bad) {
            Err(Error::Parse { locus, .. }) => assert!(locus.starts_with("line 3")),
            other => panic!("unexpected {other:?}"),
        }
        let flat = r#"{"dimension":2,"vertices":[[0,0],[1,0],[2,0]],"cells":[[0,1,2]]}"#;
        assert!(matches!(load_mesh::<f64>(flat), Err(Error::Parse { .. })));
    }

    #[test]
    fn box_round_trip() {
        let m = box_mesh::<f64>(3, 2).unwrap();
        let back = load_mesh::<f64>(&save_mesh(&m, None, None)).unwrap();
        assert_eq!(back.complex.counts(), m.counts());
        assert!((back.complex.total_volume() - 1.0).abs() < 1e-14);
    }
}
