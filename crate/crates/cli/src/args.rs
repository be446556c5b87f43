use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "subeq",
    version,
    about = "Checks and grid solves for subequations of second-order PDE"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// JSON object whose keys are long flag names; flags given on the
    /// command line take precedence. May carry the subcommand as "command".
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sampled check of the positivity (P) and negativity (N) axioms.
    Check(CheckArgs),
    /// Dirichlet dual membership against a named partner, or dual(dual F) = F.
    DualTest(DualTestArgs),
    /// Sampled F + M ⊂ F together with the dual form F + F̃ ⊂ M̃.
    MonoTest(MonoTestArgs),
    /// Riesz characteristic of a monotonicity cone.
    Riesz(RieszArgs),
    /// Hyperbolicity, Gårding eigenvalues and cone convexity of a polynomial.
    Garding(GardingArgs),
    /// Strict boundary convexity on a star-shaped domain.
    Convexity(ConvexityArgs),
    /// Discrete Perron solve of the Dirichlet problem.
    Solve(SolveArgs),
    /// Perron solve capped by an obstacle.
    Obstacle(ObstacleArgs),
    /// Primal and dual Perron solves and their ordering.
    Bracket(SolveArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check(_) => "check",
            Command::DualTest(_) => "dual-test",
            Command::MonoTest(_) => "mono-test",
            Command::Riesz(_) => "riesz",
            Command::Garding(_) => "garding",
            Command::Convexity(_) => "convexity",
            Command::Solve(_) => "solve",
            Command::Obstacle(_) => "obstacle",
            Command::Bracket(_) => "bracket",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Check(a) => &a.common,
            Command::DualTest(a) => &a.common,
            Command::MonoTest(a) => &a.common,
            Command::Riesz(a) => &a.common,
            Command::Garding(a) => &a.common,
            Command::Convexity(a) => &a.common,
            Command::Solve(a) | Command::Bracket(a) => &a.common,
            Command::Obstacle(a) => &a.solve.common,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every random draw.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Report path; the JSON report goes to stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Sampling {
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Dimension for names without n=.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_name = "NAME")]
    pub subeq: String,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct DualTestArgs {
    #[arg(long, value_name = "NAME")]
    pub subeq: String,
    /// Expected dual. Defaults to the complementary branch for branch names.
    #[arg(long, value_name = "NAME")]
    pub against: Option<String>,
    /// Samples with |rho| below this on either side are not compared.
    #[arg(long, default_value_t = 1e-9)]
    pub band: f64,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct MonoTestArgs {
    #[arg(long, value_name = "NAME")]
    pub subeq: String,
    #[arg(long, value_name = "NAME")]
    pub cone: String,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RieszArgs {
    #[arg(long, value_name = "NAME")]
    pub cone: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 64)]
    pub directions: usize,
    /// Also test 𝒫(p) ⊂ M by sampling.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct GardingArgs {
    /// det, sigma:m or sigma=m, with optional :n=N.
    #[arg(long, value_name = "NAME")]
    pub poly: String,
    #[arg(long)]
    pub n: Option<usize>,
    /// Symmetric matrix, rows separated by ';' and entries by ','.
    #[arg(long, value_name = "ROWS")]
    pub matrix: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ConvexityArgs {
    #[arg(long, value_name = "NAME")]
    pub subeq: String,
    /// Defining function, Ω = {domain < 0}.
    #[arg(long, value_name = "EXPR")]
    pub domain: String,
    /// Dimension for names without n=.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Boundary points sampled by rays from the center.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    /// Comma-separated center of the star-shaped domain.
    #[arg(long, value_name = "X")]
    pub center: Option<String>,
    #[arg(long, default_value_t = 65536.0)]
    pub t_max: f64,
    /// Scale of the λ grid for r-dependent equations.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_scale: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilArg {
    Standard,
    Wide,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderingArg {
    Alternating,
    Colored,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_name = "NAME")]
    pub subeq: String,
    /// Defining function, Ω = {domain < 0}.
    #[arg(long, value_name = "EXPR")]
    pub domain: String,
    /// Boundary data φ.
    #[arg(long, value_name = "EXPR")]
    pub bc: String,
    #[arg(long)]
    pub h: f64,
    /// Dimension for names without n=.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Bounding box "lo1,..,lon:hi1,..,hin"; sized automatically when absent.
    #[arg(long = "box", value_name = "LO:HI")]
    pub bbox: Option<String>,
    #[arg(long, value_enum, default_value_t = StencilArg::Standard)]
    pub stencil: StencilArg,
    #[arg(long, value_enum, default_value_t = OrderingArg::Alternating)]
    pub ordering: OrderingArg,
    /// auto, none, or a fixed ω.
    #[arg(long, default_value = "auto")]
    pub omega: String,
    #[arg(long, default_value_t = 100_000)]
    pub max_sweeps: usize,
    #[arg(long)]
    pub sweep_tol: Option<f64>,
    /// Exact solution; the report then carries the max nodal error.
    #[arg(long, value_name = "EXPR")]
    pub exact: Option<String>,
    /// Field CSV path.
    #[arg(long, value_name = "FILE", default_value = "field.csv")]
    pub field: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ObstacleArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Upper obstacle g.
    #[arg(long, value_name = "EXPR")]
    pub obstacle: String,
}
