use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use facet_volumes::cone::CONE_TOL;

#[derive(Debug, Parser)]
#[command(name = "facetvol", version, about = "Facet-volume vectors of convex polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Ambient dimension.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Number of facets (or coordinates).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub count: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "tol-cone", global = true, default_value_t = CONE_TOL)]
    pub tol_cone: f64,
    #[arg(long = "tol-area", global = true, default_value_t = 1e-8)]
    pub tol_area: f64,
    #[arg(long = "tol-residual", global = true, default_value_t = 1e-11)]
    pub tol_residual: f64,
    #[arg(long = "tol-distinct", global = true, default_value_t = 1e-6)]
    pub tol_distinct: f64,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Facet volumes, shape class and cone verdict of a simplex.
    Volumes(VertexArgs),
    /// Shape class of a simplex, or of a list of facet volumes.
    Classify(ClassifyArgs),
    /// Cone membership of a vector, compared with the polar description.
    Membership(AlphaArgs),
    /// Unit normals balancing the given weights.
    SolveNormals(AlphaArgs),
    /// Polytope with the normals and facet volumes of a normal system (JSON).
    Reconstruct(FileArgs),
    /// Membership, normals, reconstruction and facet volumes in one pipeline.
    Roundtrip(AlphaArgs),
    /// Normalised squared facet volumes of Gaussian simplices.
    Sample,
    /// The body P_{n-1} and its polar, with regularity audits.
    Polar,
    /// Constant Heron area along latitude circles.
    LatitudeCheck(LatitudeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VertexArgs {
    /// File with one vertex per line, or a JSON array; `-` reads standard input.
    pub input: Option<PathBuf>,
    /// Inline vertices, e.g. "0 0; 4 0; 0 3".
    #[arg(long, conflicts_with = "input")]
    pub vertices: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub vertices: VertexArgs,
    /// Facet volumes instead of vertices.
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true, conflicts_with_all = ["input", "vertices"])]
    pub alpha: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct AlphaArgs {
    /// Entries separated by spaces or commas.
    #[arg(required = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FileArgs {
    /// JSON file; `-` reads standard input.
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct LatitudeArgs {
    #[arg(long, default_value_t = 100)]
    pub circles: usize,
}
