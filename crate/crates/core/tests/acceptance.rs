//! Acceptance suite. Every test prints one `PASS`/`FAIL` line for its
//! criterion and then asserts it. Run with
//! `cargo test -p kml-core --test acceptance -- --nocapture --test-threads 1`.

use kml_core::forms::{Cochain, FormSystem};
use kml_core::hodge::HodgeSolver;
use kml_core::linalg::bilinear;
use kml_core::mesh::{annulus_mesh, box_mesh, tag_boundary, BoundaryPartition, SimplicialComplex, SliceSpec, Tag};
use kml_core::spectra::{korn_standard_constant, poincare_constant};
use kml_core::tensor::{
    grad_vector_field, pi_so, skew_basis, verify_main_inequality, verify_media_variant, Case, MaterialField, Sampling,
    TensorField, TensorForms, VerificationReport, SKEW_MATCH_TOL,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Mesh = SimplicialComplex<f64>;

fn verdict(id: u32, title: &str, ok: bool, detail: String, elapsed: Duration, budget: Duration) {
    let in_time = elapsed <= budget;
    let status = if ok && in_time { "PASS" } else { "FAIL" };
    println!(
        "criterion {id:>2} {status}: {title} | {detail} | {:.2}s of {}s",
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its time budget");
}

fn bottom(m: &Mesh) -> BoundaryPartition {
    tag_boundary(m, |x, _| if x[1] < 1e-12 { Tag::Tangential } else { Tag::Normal })
}

fn single_thread<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn c01_coboundary_squares_to_zero() {
    let start = Instant::now();
    let meshes = [
        box_mesh::<f64>(2, 8).unwrap(),
        box_mesh::<f64>(2, 16).unwrap(),
        box_mesh::<f64>(3, 4).unwrap(),
        annulus_mesh::<f64>(32, 4).unwrap(),
    ];
    let mut nonzero = 0usize;
    let mut products = 0usize;
    for m in &meshes {
        for q in 0..m.dim().saturating_sub(1) {
            let a = m.incidence(q);
            let b = m.incidence(q + 1);
            let prod = &b * &a;
            nonzero += prod.values().iter().filter(|&&v| v != 0).count();
            products += 1;
        }
    }
    verdict(
        1,
        "integer d∘d = 0",
        nonzero == 0,
        format!("{products} products, {nonzero} nonzero entries"),
        start.elapsed(),
        Duration::from_secs(1),
    );
}

#[test]
fn c02_hodge_split_random_cochains() {
    let start = Instant::now();
    let b = box_mesh::<f64>(2, 8).unwrap();
    let a = annulus_mesh::<f64>(16, 2).unwrap();
    let configs: Vec<(&str, &Mesh, BoundaryPartition)> = vec![
        ("box, empty", &b, BoundaryPartition::all_normal(&b)),
        ("box, full", &b, BoundaryPartition::all_tangential(&b)),
        ("box, bottom", &b, bottom(&b)),
        ("annulus, empty", &a, BoundaryPartition::all_normal(&a)),
    ];
    let mut worst = [0.0f64; 5];
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (_, m, p) in &configs {
        let s = HodgeSolver::new(m, p).unwrap();
        for q in 0..=2 {
            let cp_lower = if q > 0 {
                Some(poincare_constant(&s, q - 1).unwrap().value)
            } else {
                None
            };
            let space = s.space(q);
            for _ in 0..100 {
                let free = DVector::from_fn(space.len(), |_, _| rng.random_range(-1.0..1.0));
                let f = Cochain::new(m, q, space.prolong(&free)).unwrap();
                let split = s.hodge_decompose(&f).unwrap();
                let d = &split.diagnostics;
                worst[0] = worst[0].max(d.reconstruction);
                worst[1] = worst[1].max(d.max_orthogonality());
                worst[2] = worst[2].max(d.pythagoras);
                let nf = split.norm;
                let sys = s.system();
                let de = kml_core::forms::l2_norm(sys, &split.exact.part).unwrap();
                let bound_de = de / nf;
                worst[3] = worst[3].max(bound_de);
                ok &= de <= nf * (1.0 + 1e-10);
                if let (Some(pot), Some(c)) = (&split.exact.potential, cp_lower) {
                    let e = kml_core::forms::l2_norm(sys, pot).unwrap();
                    let graph = (e * e + de * de).sqrt();
                    let lim = (1.0 + c * c).sqrt() * nf;
                    worst[4] = worst[4].max(graph / lim);
                    ok &= graph <= lim * (1.0 + 1e-6);
                }
            }
        }
    }
    ok &= worst[0] <= 1e-8 && worst[1] <= 1e-8 && worst[2] <= 1e-8;
    verdict(
        2,
        "Hodge split of random cochains",
        ok,
        format!(
            "1200 splits; reconstruction {:.1e}, orthogonality {:.1e}, pythagoras {:.1e}, ‖dE‖/‖F‖ ≤ {:.6}, ‖E‖_d/bound ≤ {:.4}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn c03_topology_dual_route() {
    let start = Instant::now();
    let b = box_mesh::<f64>(2, 16).unwrap();
    let a = annulus_mesh::<f64>(32, 4).unwrap();
    let cases: Vec<(&str, &Mesh, BoundaryPartition, Vec<usize>)> = vec![
        ("box, full", &b, BoundaryPartition::all_tangential(&b), vec![0, 0, 1]),
        ("box, bottom", &b, bottom(&b), vec![0, 0, 0]),
        ("annulus, empty", &a, BoundaryPartition::all_normal(&a), vec![1, 1, 0]),
    ];
    let mut ok = true;
    let mut found = Vec::new();
    for (name, m, p, want) in &cases {
        let pairs = HodgeSolver::new(m, p).unwrap().betti_pair().unwrap();
        let eig: Vec<usize> = pairs.iter().map(|x| x.0).collect();
        let exact: Vec<usize> = pairs.iter().map(|x| x.1).collect();
        ok &= eig == exact && &exact == want;
        found.push(format!("{name}: eigen {eig:?} exact {exact:?}"));
    }
    verdict(
        3,
        "harmonic dimensions by two routes",
        ok,
        found.join("; "),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn c04_analytic_poincare_constants() {
    let start = Instant::now();
    let target = 1.0 / (2f64.sqrt() * PI);
    let mut errs = Vec::new();
    let mut last = 0.0;
    for n in [8, 16, 32] {
        let m = box_mesh::<f64>(2, n).unwrap();
        let s = HodgeSolver::new(&m, &BoundaryPartition::all_tangential(&m)).unwrap();
        last = poincare_constant(&s, 0).unwrap().value;
        errs.push((last - target).abs());
    }
    let orders = [(errs[0] / errs[1]).log2(), (errs[1] / errs[2]).log2()];
    let m = box_mesh::<f64>(2, 32).unwrap();
    let s = HodgeSolver::new(&m, &BoundaryPartition::all_normal(&m)).unwrap();
    let neumann = poincare_constant(&s, 0).unwrap().value;
    let rel_d = (last - target).abs() / target;
    let rel_n = (neumann - 1.0 / PI).abs() * PI;
    let ok = rel_d <= 0.02 && rel_n <= 0.02 && orders.iter().all(|&o| o >= 1.8);
    verdict(
        4,
        "analytic scalar Poincaré constants",
        ok,
        format!(
            "full: {last:.6} (rel {rel_d:.2e}), orders {:.3}/{:.3}; empty: {neumann:.6} (rel {rel_n:.2e})",
            orders[0], orders[1]
        ),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn c05_korn_full_boundary() {
    let start = Instant::now();
    let meshes = [
        ("box2/8", box_mesh::<f64>(2, 8).unwrap()),
        ("box2/16", box_mesh::<f64>(2, 16).unwrap()),
        ("box3/3", box_mesh::<f64>(3, 3).unwrap()),
        ("annulus/32x4", annulus_mesh::<f64>(32, 4).unwrap()),
    ];
    let mut ok = true;
    let mut vals = Vec::new();
    for (name, m) in &meshes {
        let k = korn_standard_constant(m, &BoundaryPartition::all_tangential(m))
            .unwrap()
            .value();
        ok &= k <= 2f64.sqrt() + 1e-8;
        vals.push(format!("{name}: {k:.8}"));
    }
    verdict(
        5,
        "Korn constant with full tangential boundary ≤ √2",
        ok,
        vals.join(", "),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

fn case_i_report() -> VerificationReport {
    let m = box_mesh::<f64>(2, 16).unwrap();
    verify_main_inequality(&m, &bottom(&m), Case::I, None, &Sampling::new(10_000, 6)).unwrap()
}

#[test]
fn c06_main_inequality_case_i() {
    let start = Instant::now();
    let r = case_i_report();
    let sharp_ok = r.sharp <= 2f64.sqrt() * r.constants.c1 * 1.05;
    let ok = r.passed && r.proof_chain.failures.is_empty() && sharp_ok;
    verdict(
        6,
        "main inequality, nonempty tangential part",
        ok,
        format!(
            "{} samples, max ratio {:.4} ≤ c1 {:.4}; sharp {:.4}; chain: pythagoras {:.1e}, korn {:.4}, maxwell {:.4}",
            r.samples,
            r.max_ratio,
            r.constants.c1,
            r.sharp,
            r.proof_chain.max_pythagoras,
            r.proof_chain.max_korn_ratio,
            r.proof_chain.max_maxwell_ratio
        ),
        start.elapsed(),
        Duration::from_secs(300),
    );
}

#[test]
fn c07_main_inequality_case_ii_prime() {
    let start = Instant::now();
    let m = box_mesh::<f64>(2, 16).unwrap();
    let p = BoundaryPartition::all_normal(&m);
    let r = verify_main_inequality(&m, &p, Case::IIPrime, None, &Sampling::new(1_000, 7)).unwrap();

    // S_T = 0 exactly when T is orthogonal to every constant skew field.
    let sys = FormSystem::new(&m).unwrap();
    let forms = TensorForms::assemble(&sys, None).unwrap();
    let basis: Vec<DVector<f64>> = skew_basis::<f64>(2)
        .iter()
        .map(|e| TensorField::constant(&m, e).stacked())
        .collect();
    let check = |t: &TensorField<f64>| {
        let st = pi_so(&m, t, None);
        let zero = st.iter().all(|x| x.abs() < 1e-10);
        let orth = basis
            .iter()
            .all(|e| bilinear(&forms.mass, &t.stacked(), e).abs() < 1e-10);
        (zero, orth)
    };
    let v: Vec<Cochain<f64>> = (0..2)
        .map(|a| {
            Cochain::new(
                &m,
                0,
                DVector::from_fn(m.n_vertices(), |i, _| {
                    let x = m.vertex(i);
                    // Symmetric Jacobian: gradient of a scalar potential.
                    if a == 0 {
                        2.0 * x[0] + x[1] * x[1]
                    } else {
                        2.0 * x[0] * x[1]
                    }
                }),
            )
            .unwrap()
        })
        .collect();
    let positive = [
        grad_vector_field(&m, &v).unwrap(),
        TensorField::constant(&m, &[1.0, 3.0, 3.0, -2.0]),
    ];
    let negative = [
        TensorField::constant(&m, &[1.0, 2.0, -1.0, 0.0]),
        grad_vector_field(&m, &v)
            .unwrap()
            .try_add(&TensorField::constant(&m, &[0.0, 0.5, -0.5, 0.0]))
            .unwrap(),
    ];
    let equiv =
        positive.iter().all(|t| check(t) == (true, true)) && negative.iter().all(|t| check(t) == (false, false));
    let mismatch = r.max_skew_mismatch.unwrap();
    let ok = r.passed && mismatch <= SKEW_MATCH_TOL && equiv;
    verdict(
        7,
        "main inequality, empty tangential part, global skew",
        ok,
        format!(
            "{} samples, max ratio {:.4} ≤ c1 {:.4}; |S_T − S_R| ≤ {mismatch:.1e}; equivalence instances {}",
            r.samples,
            r.max_ratio,
            r.constants.c1,
            if equiv { "ok" } else { "wrong" }
        ),
        start.elapsed(),
        Duration::from_secs(180),
    );
}

#[test]
fn c08_main_inequality_case_ii() {
    let start = Instant::now();
    let m = annulus_mesh::<f64>(32, 4).unwrap();
    let (upper, lower): (Vec<usize>, Vec<usize>) = (0..m.n_cells()).partition(|&c| m.centroid(m.dim(), c)[1] >= 0.0);
    let slices = SliceSpec::new(&m, vec![upper, lower]).unwrap();
    let r = verify_main_inequality(
        &m,
        &BoundaryPartition::all_normal(&m),
        Case::II,
        Some(&slices),
        &Sampling::new(1_000, 8),
    )
    .unwrap();
    verdict(
        8,
        "main inequality, sliced annulus, piecewise skew",
        r.passed && r.slices == 2,
        format!(
            "{} samples, max ratio {:.4} ≤ c2 {:.4}; global-skew ratio {:.4}; slice Korn {:?}",
            r.samples,
            r.max_ratio,
            r.constants.c2,
            r.max_global_skew_ratio.unwrap(),
            r.constants.korn_pieces
        ),
        start.elapsed(),
        Duration::from_secs(180),
    );
}

#[test]
fn c09_media_variant() {
    let start = Instant::now();
    let m = box_mesh::<f64>(2, 16).unwrap();
    let p = bottom(&m);
    let sampling = Sampling::new(10_000, 6);
    let base = case_i_report();
    let mut id = verify_media_variant(&m, &p, &MaterialField::identity(&m), None, &sampling).unwrap();
    let applies = id.media.take().is_some_and(|s| s.bound_applies);
    let same = applies && id == base;

    let mu = MaterialField::from_fn(&m, |x| {
        let (a, b) = (1.0 + 0.5 * x[0], 0.7 + 0.6 * x[1]);
        let c = 0.3 * (PI * x[0]).sin();
        vec![a, c, c, b]
    })
    .unwrap();
    let r = verify_media_variant(&m, &p, &mu, None, &sampling).unwrap();
    let media = r.media.clone().unwrap();
    let ok = same && media.mu_hat >= 0.5 && media.empirical_constant.is_finite() && r.passed;
    verdict(
        9,
        "weighted symmetric part",
        ok,
        format!(
            "identity reproduces case (i): {same}; varying μ: det ≥ {:.3}, empirical constant {:.4}, sharp {:.4}",
            media.mu_hat, media.empirical_constant, r.sharp
        ),
        start.elapsed(),
        Duration::from_secs(180),
    );
}

#[test]
fn c10_reproducible_reports() {
    let start = Instant::now();
    let a = single_thread(|| serde_json::to_string_pretty(&case_i_report()).unwrap());
    let b = single_thread(|| serde_json::to_string_pretty(&case_i_report()).unwrap());
    verdict(
        10,
        "byte-identical reports on one thread",
        a.as_bytes() == b.as_bytes(),
        format!("{} bytes each", a.len()),
        start.elapsed(),
        Duration::from_secs(600),
    );
}
