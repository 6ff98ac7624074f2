use super::composite::composite_constants;
use super::korn::{korn_irrotational, korn_standard_constant, korn_tangential_constant};
use super::poincare::poincare_constant;
use super::sharp::sharp_mixed_constant;
use crate::error::{Error, Result};
use crate::hodge::HodgeSolver;
use crate::mesh::{auto_slice, betti_numbers, BoundaryPartition, SimplicialComplex, SliceSpec};
use crate::scalar::Real;
use crate::tensor::TensorForms;
use serde::Serialize;
use std::collections::BTreeMap;

/// What to compute.
#[derive(Clone, Debug)]
pub struct ConstantsOptions {
    /// Poincaré degrees; `None` means every degree.
    pub degrees: Option<Vec<usize>>,
    /// Maxwell, Korn and composite constants.
    pub korn: bool,
    /// Sharp constant of the main inequality.
    pub sharp: bool,
}

impl Default for ConstantsOptions {
    fn default() -> Self {
        Self {
            degrees: None,
            korn: true,
            sharp: true,
        }
    }
}

impl ConstantsOptions {
    /// Only the Poincaré constants of the given degrees.
    pub fn poincare_only(degrees: Vec<usize>) -> Self {
        Self {
            degrees: Some(degrees),
            korn: false,
            sharp: false,
        }
    }
}

/// Computed constants of one mesh and boundary partition.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsReport {
    pub dimension: usize,
    pub vertices: usize,
    pub cells: usize,
    pub mesh_size: f64,
    pub gamma_t_facets: usize,
    pub gamma_n_facets: usize,
    pub harmonic_dims: Vec<usize>,
    /// `c_{p,q}` indexed by degree; `null` when not computed or undefined.
    pub poincare: Vec<Option<f64>>,
    pub maxwell: Option<f64>,
    pub korn_standard: Option<f64>,
    pub korn_tangential: Option<f64>,
    pub korn_irrotational: Option<f64>,
    pub slices: Option<usize>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub sharp: Option<f64>,
    pub sharp_deflated_so: bool,
    /// Eigen residuals `‖Ax − λBx‖/‖x‖` keyed by constant.
    pub residuals: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

/// Resolves the slicing used for Korn constants: the given one, a single
/// piece for simply connected meshes, or an automatic one.
pub fn resolve_slices<T: Real>(complex: &SimplicialComplex<T>, slices: Option<&SliceSpec>) -> Result<SliceSpec> {
    if let Some(s) = slices {
        return Ok(s.clone());
    }
    let b = betti_numbers(complex)?;
    if b[0] == 1 && b[1] == 0 {
        Ok(SliceSpec::single(complex))
    } else {
        auto_slice(complex)
    }
}

fn soft<T>(r: Result<T>, what: &str, notes: &mut Vec<String>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NoInteriorDofs) => {
            notes.push(format!("{what}: no interior degrees of freedom"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

pub fn compute_constants<T: Real>(
    complex: &SimplicialComplex<T>,
    partition: &BoundaryPartition,
    slices: Option<&SliceSpec>,
    options: &ConstantsOptions,
) -> Result<ConstantsReport> {
    let solver = HodgeSolver::new(complex, partition)?;
    let n = complex.dim();
    let mut notes = Vec::new();
    let mut residuals = BTreeMap::new();
    let harmonic_dims = solver.betti_pair()?.into_iter().map(|(e, _)| e).collect();

    let degrees: Vec<usize> = options.degrees.clone().unwrap_or_else(|| (0..=n).collect());
    let mut poincare = vec![None; n + 1];
    for q in degrees {
        complex.check_degree(q)?;
        if let Some(c) = soft(
            poincare_constant(&solver, q),
            &format!("poincare degree {q}"),
            &mut notes,
        )? {
            poincare[q] = Some(c.value.as_f64());
            let worst = [c.exact_side, c.coexact_side]
                .iter()
                .flatten()
                .fold(0.0f64, |m, s| m.max(s.residual.as_f64()));
            residuals.insert(format!("poincare_{q}"), worst);
        }
    }

    let mut report = ConstantsReport {
        dimension: n,
        vertices: complex.n_vertices(),
        cells: complex.n_cells(),
        mesh_size: complex.mesh_size().as_f64(),
        gamma_t_facets: partition.gamma_t().len(),
        gamma_n_facets: partition.gamma_n().len(),
        harmonic_dims,
        poincare,
        maxwell: None,
        korn_standard: None,
        korn_tangential: None,
        korn_irrotational: None,
        slices: None,
        c1: None,
        c2: None,
        sharp: None,
        sharp_deflated_so: false,
        residuals,
        notes,
    };

    if options.korn {
        let cm = soft(poincare_constant(&solver, 1), "maxwell", &mut report.notes)?;
        if let Some(c) = &cm {
            report.maxwell = Some(c.value.as_f64());
            report.poincare[1] = Some(c.value.as_f64());
        }
        if let Some(k) = soft(
            korn_standard_constant(complex, partition),
            "korn standard",
            &mut report.notes,
        )? {
            report.korn_standard = Some(k.value().as_f64());
            report
                .residuals
                .insert("korn_standard".into(), k.constant.residual.as_f64());
        }
        if !partition.is_tangential_empty() {
            if let Some(k) = soft(
                korn_tangential_constant(complex, partition),
                "korn tangential",
                &mut report.notes,
            )? {
                report.korn_tangential = Some(k.value().as_f64());
                report
                    .residuals
                    .insert("korn_tangential".into(), k.constant.residual.as_f64());
            }
        } else {
            report
                .notes
                .push("empty tangential part: Korn constants factor out rigid motions".into());
        }
        let spec = resolve_slices(complex, slices)?;
        report.slices = Some(spec.len());
        if let Some(k) = soft(
            korn_irrotational(complex, partition, &spec),
            "korn irrotational",
            &mut report.notes,
        )? {
            report.korn_irrotational = Some(k.value.as_f64());
            let worst = k.pieces.iter().fold(0.0f64, |m, p| m.max(p.constant.residual.as_f64()));
            report.residuals.insert("korn_irrotational".into(), worst);
            if let Some(cm) = &cm {
                let (c1, c2) = composite_constants(k.value, cm.value)?;
                report.c1 = Some(c1.as_f64());
                report.c2 = Some(c2.as_f64());
            }
        }
    }

    if options.sharp {
        let forms = TensorForms::assemble(solver.system(), None)?;
        let deflate = partition.is_tangential_empty();
        if let Some(s) = soft(
            sharp_mixed_constant(&solver, &forms, deflate),
            "sharp constant",
            &mut report.notes,
        )? {
            report.sharp = Some(s.value().as_f64());
            report.sharp_deflated_so = s.deflated_so;
            report.residuals.insert("sharp".into(), s.constant.residual.as_f64());
        }
    }
    Ok(report)
}
