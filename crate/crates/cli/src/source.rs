use crate::error::CliError;
use kml_core::mesh::{
    annulus_mesh, auto_slice, box_mesh, load_mesh, tag_boundary, BoundaryPartition, SimplicialComplex, SliceSpec, Tag,
};
use kml_core::tensor::MaterialField;
use serde::Serialize;
use std::path::Path;

/// Parsed `--gen` value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Generator {
    Box { dim: usize, n: usize },
    Annulus { angular: usize, radial: usize },
}

impl Generator {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = || {
            CliError::Usage(format!(
                "bad generator `{s}` (expected box:DIM,N or annulus:ANGULAR,RADIAL)"
            ))
        };
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<usize> = rest
            .split(',')
            .map(|x| x.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        match (kind, nums.as_slice()) {
            ("box", &[dim, n]) => Ok(Generator::Box { dim, n }),
            ("annulus", &[angular, radial]) => Ok(Generator::Annulus { angular, radial }),
            _ => Err(bad()),
        }
    }

    pub fn build(&self) -> Result<SimplicialComplex<f64>, CliError> {
        Ok(match *self {
            Generator::Box { dim, n } => box_mesh(dim, n)?,
            Generator::Annulus { angular, radial } => annulus_mesh(angular, radial)?,
        })
    }
}

/// A mesh with whatever annotations came with it.
pub struct Loaded {
    pub complex: SimplicialComplex<f64>,
    pub file_partition: Option<BoundaryPartition>,
    pub file_slices: Option<SliceSpec>,
    pub reoriented: Vec<usize>,
}

pub fn load(generator: Option<&str>, file: Option<&Path>) -> Result<Loaded, CliError> {
    match (generator, file) {
        (Some(g), None) => Ok(Loaded {
            complex: Generator::parse(g)?.build()?,
            file_partition: None,
            file_slices: None,
            reoriented: vec![],
        }),
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            let m = load_mesh(&text)?;
            Ok(Loaded {
                complex: m.complex,
                file_partition: m.partition,
                file_slices: m.slices,
                reoriented: m.reoriented,
            })
        }
        _ => Err(CliError::Usage("give exactly one of --gen and --mesh".into())),
    }
}

fn angle_deg(x: &[f64]) -> f64 {
    let a = x[1].atan2(x[0]).to_degrees();
    if a < 0.0 {
        a + 360.0
    } else {
        a
    }
}

/// Resolves a `--gt` preset. Without a preset, file tags are used if
/// present, otherwise the tangential part is empty.
pub fn partition(
    complex: &SimplicialComplex<f64>,
    preset: Option<&str>,
    from_file: Option<&BoundaryPartition>,
) -> Result<BoundaryPartition, CliError> {
    let preset = match preset {
        Some(p) => p,
        None => {
            return Ok(from_file
                .cloned()
                .unwrap_or_else(|| BoundaryPartition::all_normal(complex)))
        }
    };
    let tag = |b: bool| if b { Tag::Tangential } else { Tag::Normal };
    let bad = || CliError::Usage(format!("bad --gt preset `{preset}`"));
    match preset {
        "all" => Ok(BoundaryPartition::all_tangential(complex)),
        "none" => Ok(BoundaryPartition::all_normal(complex)),
        "file" => from_file
            .cloned()
            .ok_or_else(|| CliError::Usage("--gt file needs a mesh file with boundary_tags".into())),
        "outer" | "inner" => {
            let outer = preset == "outer";
            let mid = radius_midpoint(complex);
            Ok(tag_boundary(complex, |x, _| {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                tag((r > mid) == outer)
            }))
        }
        p if p.starts_with("side:") => {
            let spec = &p[5..];
            let mut chars = spec.chars();
            let axis = match chars.next() {
                Some('x') => 0,
                Some('y') => 1,
                Some('z') => 2,
                Some('w') => 3,
                _ => return Err(bad()),
            };
            let low = match chars.next() {
                Some('-') => true,
                Some('+') => false,
                _ => return Err(bad()),
            };
            if chars.next().is_some() || axis >= complex.dim() {
                return Err(bad());
            }
            let (lo, hi) = coordinate_range(complex, axis);
            let tol = 1e-9 * (hi - lo).max(1.0);
            Ok(tag_boundary(complex, |x, _| {
                tag(if low { x[axis] < lo + tol } else { x[axis] > hi - tol })
            }))
        }
        p if p.starts_with("angular:") => {
            let (a, b) = p[8..].split_once("..").ok_or_else(bad)?;
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if complex.dim() != 2 {
                return Err(CliError::Usage("angular presets need a 2D mesh".into()));
            }
            Ok(tag_boundary(complex, |x, _| {
                let t = angle_deg(x);
                tag(if a <= b { t >= a && t <= b } else { t >= a || t <= b })
            }))
        }
        _ => Err(bad()),
    }
}

fn coordinate_range(complex: &SimplicialComplex<f64>, axis: usize) -> (f64, f64) {
    (0..complex.n_vertices()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        let x = complex.vertex(v)[axis];
        (lo.min(x), hi.max(x))
    })
}

fn radius_midpoint(complex: &SimplicialComplex<f64>) -> f64 {
    let (lo, hi) = (0..complex.n_vertices()).fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
        let x = complex.vertex(v);
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        (lo.min(r), hi.max(r))
    });
    0.5 * (lo + hi)
}

/// Resolves `--slices`: `auto`, a file of canonical cell-index arrays, or
/// the slices stored in the mesh file.
pub fn slices(
    complex: &SimplicialComplex<f64>,
    spec: Option<&str>,
    from_file: Option<&SliceSpec>,
) -> Result<Option<SliceSpec>, CliError> {
    match spec {
        None => Ok(from_file.cloned()),
        Some("auto") => Ok(Some(auto_slice(complex)?)),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
            let pieces: Vec<Vec<usize>> =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
            Ok(Some(SliceSpec::new(complex, pieces)?))
        }
    }
}

/// Reads per-vertex `N × N` matrices.
pub fn material(complex: &SimplicialComplex<f64>, path: &Path) -> Result<MaterialField<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mats: Vec<Vec<Vec<f64>>> =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let n = complex.dim();
    if mats.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
        return Err(CliError::Usage(format!(
            "{}: every matrix must be {n}×{n}",
            path.display()
        )));
    }
    Ok(MaterialField::new(
        complex,
        mats.into_iter().flatten().flatten().collect(),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_specs() {
        assert_eq!(Generator::parse("box:3,4").unwrap(), Generator::Box { dim: 3, n: 4 });
        assert_eq!(
            Generator::parse("annulus:16, 2").unwrap(),
            Generator::Annulus { angular: 16, radial: 2 }
        );
        for bad in ["box:2", "box:2,3,4", "torus:1,2", "box", "box:a,b", "annulus:-1,2"] {
            assert!(matches!(Generator::parse(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn presets_select_expected_facets() {
        let m = Generator::parse("box:2,4").unwrap().build().unwrap();
        let count = |p: &str| partition(&m, Some(p), None).unwrap().gamma_t().len();
        assert_eq!(count("all"), 16);
        assert_eq!(count("none"), 0);
        assert_eq!(count("side:y-"), 4);
        assert_eq!(count("side:x+"), 4);
        assert!(partition(&m, Some("side:q-"), None).is_err());
        assert!(partition(&m, Some("file"), None).is_err());
        let a = Generator::parse("annulus:16,2").unwrap().build().unwrap();
        let count = |p: &str| partition(&a, Some(p), None).unwrap().gamma_t().len();
        assert_eq!(count("outer"), 16);
        assert_eq!(count("inner"), 16);
        assert_eq!(count("angular:0..180"), 16);
    }

    #[test]
    fn default_partition_is_empty_without_file_tags() {
        let m = Generator::parse("box:2,2").unwrap().build().unwrap();
        assert!(partition(&m, None, None).unwrap().gamma_t().is_empty());
    }
}
