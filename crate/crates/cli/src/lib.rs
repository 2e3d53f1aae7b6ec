//! Command-line surface of `mconc`: state and spec ingestion, evaluation,
//! mixed-state bounds, separability fingerprints, the table of reference
//! values, and noise sweeps.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage or shape error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod files;
pub mod report;

use commands::{Family, MakeKind, MakeSpec, MixedOptions};
use files::{read_state, StateFile};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }
}

impl From<mconc::Error> for Failure {
    fn from(e: mconc::Error) -> Self {
        match e {
            mconc::Error::Numerical(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mconc", version, about = "Generalized concurrences of multipartite states")]
pub struct Cli {
    /// Emit JSON with full-precision numbers instead of aligned CSV.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel restarts.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, env = "MCONC_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct MixedArgs {
    /// Restarts of the lower-bound optimization.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Also report the quasi-pure approximation.
    #[arg(long)]
    pub quasi_pure: bool,
    /// Also run the direct roof search, optionally with M members.
    #[arg(long, value_name = "M", num_args = 0..=1)]
    pub roof: Option<Option<usize>>,
    #[arg(long, default_value_t = 8)]
    pub roof_restarts: usize,
}

impl MixedArgs {
    fn options(&self, seed: u64) -> MixedOptions {
        MixedOptions {
            restarts: self.restarts,
            seed,
            quasi_pure: self.quasi_pure,
            roof: self.roof,
            roof_restarts: self.roof_restarts,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrence of a pure state.
    EvalPure {
        state: PathBuf,
        /// Named concurrence or JSON spec file.
        #[arg(long)]
        spec: String,
    },
    /// Lower bound (and optionally quasi-pure value and roof estimate) of
    /// a mixed state.
    BoundMixed {
        state: PathBuf,
        #[arg(long)]
        spec: String,
        #[command(flatten)]
        mixed: MixedArgs,
    },
    /// All named concurrences of a three- or four-party state.
    Fingerprint {
        state: PathBuf,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Tri- and four-partite reference values for random bi-separable and
    /// GHZ states.
    Table1 {
        #[arg(long, default_value_t = 1)]
        draws: usize,
    },
    /// White-noise sweep of a state family.
    Scan {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        parties: usize,
        #[arg(long)]
        spec: String,
        /// Comma-separated visibilities (default 0, 0.1, ..., 1).
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[command(flatten)]
        mixed: MixedArgs,
    },
    /// Write a state file.
    Make {
        #[arg(value_enum)]
        kind: MakeKind,
        #[arg(long, default_value_t = 3)]
        parties: usize,
        /// Local dimension for GHZ states and default random shapes.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Schmidt weights of a GHZ state.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Local dimensions of a random state.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        rank: Option<usize>,
        /// Mix with white noise at this visibility.
        #[arg(long)]
        visibility: Option<f64>,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Report(report::Report),
    State(StateFile),
}

impl Output {
    pub fn render(&self, json: bool) -> String {
        match self {
            Output::Report(r) if json => r.to_json() + "\n",
            Output::Report(r) => r.to_csv(),
            Output::State(s) => s.to_json() + "\n",
        }
    }

    pub fn failures(&self) -> usize {
        match self {
            Output::Report(r) => r.failures,
            Output::State(_) => 0,
        }
    }
}

/// Runs the command on the calling thread's rayon pool.
pub fn run(cli: &Cli) -> Result<Output, Failure> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::EvalPure { state, spec } => Output::Report(commands::eval_pure(&read_state(state)?, spec)?),
        Command::BoundMixed { state, spec, mixed } => {
            Output::Report(commands::bound_mixed(&read_state(state)?, spec, &mixed.options(seed))?)
        }
        Command::Fingerprint { state, restarts } => {
            let opts = MixedOptions { restarts: *restarts, seed, ..Default::default() };
            Output::Report(commands::fingerprint(&read_state(state)?, &opts)?)
        }
        Command::Table1 { draws } => Output::Report(commands::table1(seed, *draws)?),
        Command::Scan { family, parties, spec, grid, mixed } => {
            let grid = grid.clone().unwrap_or_else(commands::default_grid);
            Output::Report(commands::scan(*family, *parties, spec, &grid, &mixed.options(seed))?)
        }
        Command::Make { kind, parties, dim, weights, dims, rank, visibility } => {
            let spec = MakeSpec {
                kind: *kind,
                parties: *parties,
                dim: *dim,
                weights: weights.clone(),
                dims: dims.clone(),
                rank: *rank,
                visibility: *visibility,
                seed,
            };
            Output::State(StateFile::from_state(&commands::make(&spec)?))
        }
    })
}

/// Runs the command, honoring `--threads`, and renders the output.
pub fn execute(cli: &Cli) -> Result<(String, usize), Failure> {
    let output = match cli.threads {
        Some(n) => {
            if n == 0 {
                return Err(Failure::Usage("--threads must be positive".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Usage(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run(cli))?
        }
        None => run(cli)?,
    };
    Ok((output.render(cli.json), output.failures()))
}
