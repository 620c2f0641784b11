use clap::{Args, Parser, Subcommand, ValueEnum};
use mokkt::gconvex::Property;
use mokkt::kkt::Mode;

#[derive(Debug, Parser)]
#[command(name = "mokkt", version, about = "Second-order KKT certification for multiobjective programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify a candidate point against second-order multiplier conditions.
    Certify {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "kt")]
        mode: ModeArg,
        /// Sampled nonzero critical directions.
        #[arg(long, default_value_t = 200)]
        directions: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// First- and second-order constraint qualifications at the point.
    Cq {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 64)]
        directions: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Classify the point against a dyadic grid of the box.
    Pareto {
        #[command(flatten)]
        input: Input,
        /// Grid refinement level: 2^K + 1 points per axis. Defaults to the
        /// coarsest level with step at most 0.02.
        #[arg(long)]
        grid: Option<u32>,
        #[arg(long, value_enum, default_value = "global")]
        scope: ScopeArg,
        /// Neighbourhood radius for the local scope (default: a tenth of the
        /// box diagonal).
        #[arg(long)]
        radius: Option<f64>,
        /// Also minimize each objective over its restricted feasible set.
        #[arg(long)]
        kanniappan: bool,
    },
    /// Search for counterexamples to a generalized-convexity property.
    Probe {
        #[command(flatten)]
        input: Input,
        /// quasiconvex-at, quasiconvex-on, pseudoconvex, two-pseudoconvex,
        /// semistrict-quasiconvex or problem-2kt-pseudoconvex.
        #[arg(long, value_parser = parse_property)]
        property: Property,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Gradient and second-order directional derivative of one function.
    Deriv {
        #[command(flatten)]
        input: Input,
        /// `f1`, `f2`, ..., `g1`, ...
        #[arg(long = "fn")]
        function: String,
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        dir: Coords,
    },
    /// Built-in problems.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
        #[arg(long, global = true)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    Show { id: String },
}

#[derive(Debug, Args)]
pub struct Input {
    /// Problem file, or `catalog:<id>` for a built-in problem.
    pub file: String,
    /// Candidate point, overriding the one in the file.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub at: Option<Coords>,
    /// Emit the JSON report instead of tables.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub tol_act: Option<f64>,
    #[arg(long)]
    pub tol_strict: Option<f64>,
    #[arg(long)]
    pub tol_curv: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Fj,
    Kt,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Fj => Mode::Fj,
            ModeArg::Kt => Mode::Kt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Global,
    Local,
}

fn parse_property(s: &str) -> Result<Property, String> {
    Property::parse(s).ok_or_else(|| {
        let known: Vec<&str> = Property::ALL.iter().map(|p| p.name()).collect();
        format!("unknown property `{s}` (known: {})", known.join(", "))
    })
}

/// A point or direction given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

/// Comma-separated numbers, e.g. `0.5,-1`.
pub fn parse_vector(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()
        .map(Coords)
}
