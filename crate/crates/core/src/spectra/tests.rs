use super::*;
use crate::error::Error;
use crate::hodge::HodgeSolver;
use crate::mesh::{annulus_mesh, box_mesh, tag_boundary, BoundaryPartition, SimplicialComplex, SliceSpec, Tag};
use crate::tensor::TensorForms;
use std::f64::consts::PI;

fn bottom(m: &SimplicialComplex<f64>) -> BoundaryPartition {
    tag_boundary(m, |x, _| if x[1] < 1e-12 { Tag::Tangential } else { Tag::Normal })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

// Unit square: first Dirichlet eigenvalue 2π², first nonzero Neumann eigenvalue π².
#[test]
fn scalar_poincare_matches_laplacian_eigenvalues() {
    let m = box_mesh::<f64>(2, 16).unwrap();
    let dir = BoundaryPartition::all_tangential(&m);
    let s = HodgeSolver::new(&m, &dir).unwrap();
    let c = poincare_constant(&s, 0).unwrap().value;
    assert!(rel(c, 1.0 / (2f64.sqrt() * PI)) < 0.02, "{c}");

    let neu = BoundaryPartition::all_normal(&m);
    let s = HodgeSolver::new(&m, &neu).unwrap();
    let c = poincare_constant(&s, 0).unwrap().value;
    assert!(rel(c, 1.0 / PI) < 0.02, "{c}");
}

#[test]
fn poincare_constant_converges_from_above_in_eigenvalue() {
    let exact = 2.0 * PI * PI;
    let mut errs = Vec::new();
    for n in [4, 8, 16] {
        let m = box_mesh::<f64>(2, n).unwrap();
        let s = HodgeSolver::new(&m, &BoundaryPartition::all_tangential(&m)).unwrap();
        let lam = poincare_constant(&s, 0).unwrap().value.powi(-2);
        assert!(lam >= exact * (1.0 - 1e-9));
        errs.push(lam - exact);
    }
    let order = (errs[1] / errs[2]).log2();
    assert!(order > 1.8, "order {order}");
}

// Tangential curl-curl on the square: smallest nonzero eigenvalue π².
#[test]
fn maxwell_constant_on_square() {
    let m = box_mesh::<f64>(2, 16).unwrap();
    let s = HodgeSolver::new(&m, &BoundaryPartition::all_tangential(&m)).unwrap();
    let c = maxwell_constant(&s).unwrap();
    assert!(rel(c.value, 1.0 / PI) < 0.02, "{}", c.value);
    let cd1 = c.coexact_side.unwrap().value;
    assert!(rel(cd1, 1.0 / PI) < 0.02);
}

#[test]
fn top_degree_has_no_coexact_side() {
    let m = box_mesh::<f64>(2, 4).unwrap();
    let s = HodgeSolver::new(&m, &bottom(&m)).unwrap();
    let c = poincare_constant(&s, 2).unwrap();
    assert!(c.coexact_side.is_none());
    assert!(c.exact_side.is_some());
}

#[test]
fn korn_with_full_tangential_boundary_is_at_most_sqrt2() {
    for m in [
        box_mesh::<f64>(2, 6).unwrap(),
        annulus_mesh::<f64>(16, 2).unwrap(),
        box_mesh::<f64>(3, 2).unwrap(),
    ] {
        let p = BoundaryPartition::all_tangential(&m);
        let k = korn_standard_constant(&m, &p).unwrap().value();
        assert!(k <= 2f64.sqrt() + 1e-8, "{k}");
        assert!(k >= 1.0 - 1e-10);
    }
}

#[test]
fn korn_variants_are_ordered() {
    let m = box_mesh::<f64>(2, 6).unwrap();
    let p = bottom(&m);
    let std = korn_standard_constant(&m, &p).unwrap().value();
    let tan = korn_tangential_constant(&m, &p).unwrap().value();
    // The tangential space contains the standard one.
    assert!(tan >= std * (1.0 - 1e-8));
    let rigid = korn_rigid_constant(&m).unwrap().value();
    assert!(rigid > 1.0 && rigid.is_finite());
}

#[test]
fn rigid_modes_lie_in_kernel_of_sym_form() {
    let m = box_mesh::<f64>(2, 3).unwrap();
    let v = VectorP1::assemble(&m).unwrap();
    let (modes, _) = rigid_modes(&m);
    let ks = crate::linalg::to_dense(&v.sym);
    let r = &ks * &modes;
    assert!(r.amax() < 1e-12);
}

#[test]
fn irrotational_korn_uses_worst_slice() {
    let m = annulus_mesh::<f64>(16, 2).unwrap();
    let p = BoundaryPartition::all_normal(&m);
    let spec = crate::mesh::auto_slice(&m).unwrap();
    let k = korn_irrotational(&m, &p, &spec).unwrap();
    assert_eq!(k.pieces.len(), spec.len());
    let max = k.pieces.iter().map(|c| c.value()).fold(0.0, f64::max);
    assert_eq!(k.value, max);
    let single = SliceSpec::single(&m);
    assert_eq!(single.len(), 1);
}

#[test]
fn sharp_constant_is_below_composite_bound() {
    let m = box_mesh::<f64>(2, 6).unwrap();
    let p = bottom(&m);
    let s = HodgeSolver::new(&m, &p).unwrap();
    let forms = TensorForms::assemble(s.system(), None).unwrap();
    let sharp = sharp_mixed_constant(&s, &forms, false).unwrap().value();
    let ck = korn_irrotational(&m, &p, &SliceSpec::single(&m)).unwrap().value;
    let cm = poincare_constant(&s, 1).unwrap().value;
    let (c1, _) = composite_constants(ck, cm).unwrap();
    assert!(sharp <= 2f64.sqrt() * c1, "{sharp} vs {c1}");
}

#[test]
fn undeflated_form_without_boundary_is_singular() {
    let m = box_mesh::<f64>(2, 3).unwrap();
    let p = BoundaryPartition::all_normal(&m);
    let s = HodgeSolver::new(&m, &p).unwrap();
    let forms = TensorForms::assemble(s.system(), None).unwrap();
    match sharp_mixed_constant(&s, &forms, false) {
        Err(Error::SingularForm {
            skew_matrix,
            eigenvalue,
            ..
        }) => {
            assert!(eigenvalue.abs() < 1e-8);
            let sm = skew_matrix.expect("kernel is a constant skew field");
            assert!((sm[0][1] + sm[1][0]).abs() < 1e-8);
            assert!(sm[0][1].abs() > 1e-6);
        }
        other => panic!("expected singular form, got {other:?}"),
    }
    let deflated = sharp_mixed_constant(&s, &forms, true).unwrap();
    assert!(deflated.value().is_finite());
    assert!(sharp_mixed_constant(&HodgeSolver::new(&m, &bottom(&m)).unwrap(), &forms, true).is_err());
}

#[test]
fn report_collects_constants() {
    let m = box_mesh::<f64>(2, 4).unwrap();
    let p = bottom(&m);
    let r = compute_constants(&m, &p, None, &ConstantsOptions::default()).unwrap();
    assert_eq!(r.poincare.len(), 3);
    assert!(r.poincare.iter().all(|c| c.is_some()));
    assert!(r.c1.unwrap() >= r.korn_irrotational.unwrap());
    assert!(r.sharp.unwrap() <= 2f64.sqrt() * r.c1.unwrap());
    let only = compute_constants(&m, &p, None, &ConstantsOptions::poincare_only(vec![0])).unwrap();
    assert!(only.poincare[1].is_none() && only.c1.is_none());
}
