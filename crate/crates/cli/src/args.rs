use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "nashfold",
    version,
    about = "Graver-basis equilibria and inverse optimization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON input file; repeat for commands that take several
    #[arg(long = "input", value_name = "PATH")]
    pub inputs: Vec<PathBuf>,

    /// Write the result payload to this file
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Override the Graver basis and enumeration caps
    #[arg(long, value_name = "N")]
    pub cap: Option<u64>,

    /// Seed for generated instances
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub seed: u64,

    /// Do not print the run report on standard output
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graver basis of a matrix: {"D": [[...]]} or a bare matrix
    Graver(Common),
    /// Build an N-fold, game or lifted matrix
    Nfold {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = MatrixKind::Nfold)]
        kind: MatrixKind,
        /// Also report Graver basis sizes for 1..=MAX bricks
        #[arg(long, value_name = "MAX")]
        growth: Option<usize>,
    },
    /// Solve a separable convex integer program
    Solve(Common),
    /// Compute a generalized Nash equilibrium
    Equilibrium(Common),
    /// Check a strategy profile: --input game.json --input profile.json
    VerifyEquilibrium(Common),
    /// Best response of one player: --input game.json --input profile.json
    BestResponse {
        #[command(flatten)]
        common: Common,
        /// Zero-based player index
        #[arg(long)]
        player: usize,
    },
    /// Solve an inverse optimization instance
    Inverse(Common),
    /// Check an inverse answer: --input iiop.json --input answer.json
    VerifyInverse(Common),
    /// Generate a seeded instance and run the brute-force oracle on it
    #[command(hide = true)]
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = OracleKind::Ip)]
        kind: OracleKind,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Graver(_) => "graver",
            Command::Nfold { .. } => "nfold",
            Command::Solve(_) => "solve",
            Command::Equilibrium(_) => "equilibrium",
            Command::VerifyEquilibrium(_) => "verify-equilibrium",
            Command::BestResponse { .. } => "best-response",
            Command::Inverse(_) => "inverse",
            Command::VerifyInverse(_) => "verify-inverse",
            Command::Oracle { .. } => "oracle",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Graver(c)
            | Command::Solve(c)
            | Command::Equilibrium(c)
            | Command::VerifyEquilibrium(c)
            | Command::Inverse(c)
            | Command::VerifyInverse(c) => c,
            Command::Nfold { common, .. }
            | Command::BestResponse { common, .. }
            | Command::Oracle { common, .. } => common,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    /// The plain N-fold stack of an {"A","B","N"} spec
    Nfold,
    /// The equilibrium matrix with aggregation and slack columns
    Nash,
    /// The lifted matrix with merged coupling blocks
    C,
    /// Equilibrium matrix of a {"types","assignment"} catalog
    Multitype,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Graver,
    Ip,
    Game,
    Iiop,
}
