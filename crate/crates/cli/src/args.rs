use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "kml",
    version,
    about = "Hodge decompositions, Poincaré/Maxwell/Korn constants and tensor inequalities on simplicial meshes"
)]
pub struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true, env = "KML_THREADS")]
    pub threads: Option<usize>,

    /// Omit the timestamp from reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build or load a mesh, check admissibility and optionally write it.
    Mesh(MeshCmd),
    /// Harmonic dimensions by the eigen and exact-rank routes.
    Betti(BettiCmd),
    /// Poincaré, Maxwell, Korn, composite and sharp constants.
    Constants(ConstantsCmd),
    /// Hodge decomposition of a cochain.
    Decompose(DecomposeCmd),
    /// Sample the main tensor inequality.
    Verify(VerifyCmd),
    /// Constants over a mesh sequence, one CSV row per mesh.
    Sweep(SweepCmd),
}

#[derive(Args, Debug, Clone)]
pub struct MeshArgs {
    /// Generated mesh: `box:DIM,N` or `annulus:ANGULAR,RADIAL`.
    #[arg(
        long = "gen",
        value_name = "SPEC",
        conflicts_with = "mesh",
        required_unless_present = "mesh"
    )]
    pub generator: Option<String>,

    /// Mesh file (JSON).
    #[arg(long, value_name = "FILE")]
    pub mesh: Option<PathBuf>,

    /// Tangential boundary part: `all`, `none`, `side:AXIS±` (e.g. `side:y-`),
    /// `angular:A..B` (degrees), `outer`, `inner` or `file`.
    #[arg(long, value_name = "PRESET")]
    pub gt: Option<String>,

    /// Slicing: `auto` or a JSON file of cell-index arrays.
    #[arg(long, value_name = "auto|FILE")]
    pub slices: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MeshCmd {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Write the mesh in canonical form with boundary tags and slices.
    #[arg(long, value_name = "FILE")]
    pub write: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BettiCmd {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct ConstantsCmd {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Only Poincaré constants of these degrees.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<usize>>,
    /// Skip the sharp constant.
    #[arg(long)]
    pub no_sharp: bool,
    /// Append a CSV row to this file.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecomposeCmd {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Cochain file `{"degree": q, "values": [...]}`.
    #[arg(long, value_name = "FILE", conflicts_with = "random")]
    pub cochain: Option<PathBuf>,
    /// Decompose a random cochain of this degree instead.
    #[arg(long, value_name = "DEGREE", requires = "seed")]
    pub random: Option<usize>,
    /// Seed for the random cochain.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for the three parts as cochain files.
    #[arg(long, value_name = "DIR")]
    pub parts_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyCmd {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// `i`, `ii` or `ii'`.
    #[arg(long = "case", value_name = "CASE")]
    pub case: String,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Seed for the sample stream (required).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative slack on the bound.
    #[arg(long, default_value_t = kml_core::tensor::DEFAULT_SLACK)]
    pub slack: f64,
    /// Material file: per-vertex N×N matrices (case i only).
    #[arg(long, value_name = "FILE")]
    pub mu: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepCmd {
    /// Generated meshes in order of decreasing mesh size; repeat the flag.
    #[arg(long = "gen", value_name = "SPEC")]
    pub generators: Vec<String>,
    /// Tangential boundary preset applied to every mesh.
    #[arg(long, value_name = "PRESET")]
    pub gt: Option<String>,
    /// Only Poincaré constants of these degrees.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<usize>>,
    /// Also compute the sharp constant.
    #[arg(long)]
    pub sharp: bool,
    /// CSV output (stdout if absent).
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}
