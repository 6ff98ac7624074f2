use crate::args::*;
use crate::error::{CliError, EXIT_OK, EXIT_VIOLATION};
use crate::report::{envelope, write_csv, CsvRow, RunConfig};
use crate::source::{self, Generator, Loaded};
use kml_core::forms::{l2_norm, Cochain};
use kml_core::hodge::{HodgeSolver, SplitDiagnostics};
use kml_core::mesh::{
    betti_numbers, validate_admissible, AdmissibilityReport, BoundaryPartition, SliceSource, SliceSpec,
};
use kml_core::spectra::{compute_constants, ConstantsOptions};
use kml_core::tensor::{verify_main_inequality, verify_media_variant, Case, Sampling};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Result of one command: the JSON report and the exit code it implies.
pub struct Outcome {
    pub json: String,
    pub exit: i32,
    /// Extra text for stdout (CSV of a sweep without `--csv`).
    pub extra: Option<String>,
}

struct Context {
    loaded: Loaded,
    partition: BoundaryPartition,
    slices: Option<SliceSpec>,
}

fn base_config(command: &str, m: &MeshArgs, threads: Option<usize>) -> Result<RunConfig, CliError> {
    let generator = m.generator.as_deref().map(Generator::parse).transpose()?;
    Ok(RunConfig {
        command: command.into(),
        generator,
        mesh_file: m.mesh.as_ref().map(|p| p.display().to_string()),
        gt: String::new(),
        slices: m.slices.clone(),
        threads,
        ..Default::default()
    })
}

fn context(m: &MeshArgs, config: &mut RunConfig) -> Result<Context, CliError> {
    let loaded = source::load(m.generator.as_deref(), m.mesh.as_deref())?;
    let partition = source::partition(&loaded.complex, m.gt.as_deref(), loaded.file_partition.as_ref())?;
    config.gt = match (&m.gt, &loaded.file_partition) {
        (Some(g), _) => g.clone(),
        (None, Some(_)) => "file".into(),
        (None, None) => "none".into(),
    };
    let slices = source::slices(&loaded.complex, m.slices.as_deref(), loaded.file_slices.as_ref())?;
    Ok(Context {
        loaded,
        partition,
        slices,
    })
}

fn emit<R: Serialize>(
    config: &RunConfig,
    report: R,
    out: &OutArgs,
    timestamp: bool,
    exit: i32,
) -> Result<Outcome, CliError> {
    let json = envelope(config, report, timestamp);
    if let Some(p) = &out.out {
        std::fs::write(p, &json)?;
    }
    Ok(Outcome {
        json,
        exit,
        extra: None,
    })
}

#[derive(Serialize)]
struct MeshReport {
    dimension: usize,
    counts: Vec<usize>,
    mesh_size: f64,
    reoriented: Vec<usize>,
    admissibility: AdmissibilityReport,
}

pub fn mesh(cmd: &MeshCmd, threads: Option<usize>, timestamp: bool) -> Result<Outcome, CliError> {
    let mut config = base_config("mesh", &cmd.mesh, threads)?;
    let ctx = context(&cmd.mesh, &mut config)?;
    let c = &ctx.loaded.complex;
    let source = match &ctx.slices {
        Some(s) => SliceSource::Provided(s),
        None => SliceSource::Auto,
    };
    let admissibility = validate_admissible(c, &ctx.partition, source)?;
    if let Some(p) = &cmd.write {
        let slices = ctx.slices.as_ref().or(admissibility.slices.as_ref());
        std::fs::write(p, kml_core::mesh::save_mesh(c, Some(&ctx.partition), slices))?;
    }
    let report = MeshReport {
        dimension: c.dim(),
        counts: c.counts(),
        mesh_size: c.mesh_size(),
        reoriented: ctx.loaded.reoriented.clone(),
        admissibility,
    };
    emit(&config, report, &cmd.out, timestamp, EXIT_OK)
}

#[derive(Serialize)]
struct BettiReport {
    /// Harmonic dimensions of the constrained complex (eigen route).
    dims: Vec<usize>,
    /// The same from exact integer ranks.
    exact: Vec<usize>,
    /// Absolute Betti numbers of the mesh.
    betti: Vec<usize>,
}

pub fn betti(cmd: &BettiCmd, threads: Option<usize>, timestamp: bool) -> Result<Outcome, CliError> {
    let mut config = base_config("betti", &cmd.mesh, threads)?;
    let ctx = context(&cmd.mesh, &mut config)?;
    let solver = HodgeSolver::new(&ctx.loaded.complex, &ctx.partition)?;
    let pairs = solver.betti_pair()?;
    let report = BettiReport {
        dims: pairs.iter().map(|p| p.0).collect(),
        exact: pairs.iter().map(|p| p.1).collect(),
        betti: betti_numbers(&ctx.loaded.complex)?,
    };
    emit(&config, report, &cmd.out, timestamp, EXIT_OK)
}

fn constants_options(q: &Option<Vec<usize>>, sharp: bool) -> ConstantsOptions {
    match q {
        Some(q) => ConstantsOptions::poincare_only(q.clone()),
        None => ConstantsOptions {
            sharp,
            ..Default::default()
        },
    }
}

fn mesh_label(m: &MeshArgs) -> String {
    m.generator
        .clone()
        .or_else(|| m.mesh.as_ref().map(|p| p.display().to_string()))
        .unwrap_or_default()
}

pub fn constants(cmd: &ConstantsCmd, threads: Option<usize>, timestamp: bool) -> Result<Outcome, CliError> {
    let mut config = base_config("constants", &cmd.mesh, threads)?;
    config.q = cmd.q.clone();
    config.sharp = Some(cmd.q.is_none() && !cmd.no_sharp);
    let ctx = context(&cmd.mesh, &mut config)?;
    let opts = constants_options(&cmd.q, !cmd.no_sharp);
    let report = compute_constants(&ctx.loaded.complex, &ctx.partition, ctx.slices.as_ref(), &opts)?;
    if let Some(p) = &cmd.csv {
        write_csv(&[CsvRow::new(mesh_label(&cmd.mesh), &report)], Some(p))?;
    }
    emit(&config, report, &cmd.out, timestamp, EXIT_OK)
}

/// Cochain file format.
#[derive(Serialize, Deserialize)]
pub struct CochainFile {
    pub degree: usize,
    pub values: Vec<f64>,
}

#[derive(Serialize)]
struct PartNorms {
    exact: f64,
    harmonic: f64,
    coexact: f64,
}

#[derive(Serialize)]
struct DecomposeReport {
    degree: usize,
    norm: f64,
    norms: PartNorms,
    diagnostics: SplitDiagnostics,
    harmonic_dim: usize,
    files: Vec<String>,
}

pub fn decompose(cmd: &DecomposeCmd, threads: Option<usize>, timestamp: bool) -> Result<Outcome, CliError> {
    let mut config = base_config("decompose", &cmd.mesh, threads)?;
    config.cochain = cmd.cochain.as_ref().map(|p| p.display().to_string());
    config.random_degree = cmd.random;
    config.seed = cmd.seed;
    let ctx = context(&cmd.mesh, &mut config)?;
    let c = &ctx.loaded.complex;
    let f = match (&cmd.cochain, cmd.random) {
        (Some(p), None) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            let file: CochainFile =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Cochain::from_vec(c, file.degree, file.values)?
        }
        (None, Some(q)) => {
            c.check_degree(q)?;
            let seed = cmd
                .seed
                .ok_or_else(|| CliError::Usage("--random needs --seed".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Cochain::new(c, q, DVector::from_fn(c.count(q), |_, _| rng.random_range(-1.0..1.0)))?
        }
        _ => return Err(CliError::Usage("give exactly one of --cochain and --random".into())),
    };
    let solver = HodgeSolver::new(c, &ctx.partition)?;
    let split = solver.hodge_decompose(&f)?;
    let sys = solver.system();
    let mut files = Vec::new();
    if let Some(dir) = &cmd.parts_dir {
        std::fs::create_dir_all(dir)?;
        for (name, part) in [
            ("exact", &split.exact.part),
            ("harmonic", &split.harmonic),
            ("coexact", &split.coexact.part),
        ] {
            let path = dir.join(format!("{name}.json"));
            let file = CochainFile {
                degree: part.degree(),
                values: part.values().iter().copied().collect(),
            };
            std::fs::write(&path, serde_json::to_string_pretty(&file).expect("serializable"))?;
            files.push(path.display().to_string());
        }
    }
    let report = DecomposeReport {
        degree: f.degree(),
        norm: split.norm,
        norms: PartNorms {
            exact: l2_norm(sys, &split.exact.part)?,
            harmonic: l2_norm(sys, &split.harmonic)?,
            coexact: l2_norm(sys, &split.coexact.part)?,
        },
        diagnostics: split.diagnostics,
        harmonic_dim: solver.harmonic_space(f.degree())?.eigen_dim,
        files,
    };
    emit(&config, report, &cmd.out, timestamp, EXIT_OK)
}

pub fn verify(cmd: &VerifyCmd, threads: Option<usize>, timestamp: bool) -> Result<Outcome, CliError> {
    let mut config = base_config("verify", &cmd.mesh, threads)?;
    let case: Case = cmd.case.parse().map_err(CliError::Usage)?;
    let seed = cmd
        .seed
        .ok_or_else(|| CliError::Usage("verify samples random fields and needs --seed".into()))?;
    if cmd.slack.is_nan() || cmd.slack < 0.0 {
        return Err(CliError::Usage("--slack must be nonnegative".into()));
    }
    config.case = Some(case.to_string());
    config.samples = Some(cmd.samples);
    config.seed = Some(seed);
    config.slack = Some(cmd.slack);
    config.mu = cmd.mu.as_ref().map(|p| p.display().to_string());
    let ctx = context(&cmd.mesh, &mut config)?;
    let c = &ctx.loaded.complex;
    let sampling = Sampling {
        samples: cmd.samples,
        seed,
        slack: cmd.slack,
    };
    let report = match &cmd.mu {
        Some(p) => {
            if case != Case::I {
                return Err(CliError::Usage("--mu applies to case i only".into()));
            }
            let mu = source::material(c, p)?;
            verify_media_variant(c, &ctx.partition, &mu, ctx.slices.as_ref(), &sampling)?
        }
        None => verify_main_inequality(c, &ctx.partition, case, ctx.slices.as_ref(), &sampling)?,
    };
    let exit = if report.passed { EXIT_OK } else { EXIT_VIOLATION };
    emit(&config, report, &cmd.out, timestamp, exit)
}

#[derive(Serialize)]
struct SweepReport {
    rows: Vec<CsvRow>,
}

pub fn sweep(cmd: &SweepCmd, threads: Option<usize>, timestamp: bool) -> Result<Outcome, CliError> {
    if cmd.generators.is_empty() {
        return Err(CliError::Usage("sweep needs at least one --gen".into()));
    }
    let gens: Vec<Generator> = cmd
        .generators
        .iter()
        .map(|g| Generator::parse(g))
        .collect::<Result<_, _>>()?;
    let config = RunConfig {
        command: "sweep".into(),
        generators: Some(gens.clone()),
        gt: cmd.gt.clone().unwrap_or_else(|| "none".into()),
        q: cmd.q.clone(),
        sharp: Some(cmd.q.is_none() && cmd.sharp),
        threads,
        ..Default::default()
    };
    let opts = constants_options(&cmd.q, cmd.sharp);
    let mut rows = Vec::with_capacity(gens.len());
    let mut last_h = f64::INFINITY;
    for (g, label) in gens.iter().zip(&cmd.generators) {
        let complex = g.build()?;
        let h = complex.mesh_size();
        if h > last_h * (1.0 + 1e-12) {
            return Err(CliError::Usage(format!(
                "sweep meshes must have nonincreasing mesh size; `{label}` is coarser"
            )));
        }
        last_h = h;
        let partition = source::partition(&complex, cmd.gt.as_deref(), None)?;
        let report = compute_constants(&complex, &partition, None, &opts)?;
        rows.push(CsvRow::new(label.clone(), &report));
    }
    let extra = write_csv(&rows, cmd.csv.as_deref().map(Path::new))?;
    let mut out = emit(&config, SweepReport { rows }, &cmd.out, timestamp, EXIT_OK)?;
    out.extra = extra;
    Ok(out)
}
