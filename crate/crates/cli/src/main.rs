use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lucanon::{CompareOptions, Strategy, DEFAULT_CLUSTER_TOL};
use lucanon_cli::{commands, files};

/// Canonical forms and local-unitary equivalence of multipartite states.
///
/// Exit codes: 0 equivalent or success, 1 inequivalent, 2 error, 3 undecided.
#[derive(Parser)]
#[command(name = "lucanon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonicalize a state file and print its singular values.
    Canon {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Decide whether two states are related by local unitaries.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        flags: CompareFlags,
    },
    /// Purify a density matrix with an extra leading party.
    Purify {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Eigenvalues at or below this are dropped.
        #[arg(long, default_value_t = 1e-10)]
        rank_tol: f64,
    },
    /// Trace out the leading party of a pure state.
    Trace0 {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a seeded random state; mixed when `--rank` is given.
    Random {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        rank: Option<usize>,
        /// Standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply seeded random local unitaries and record them in a sidecar.
    Rotate {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
        /// Defaults to the output path with `.unitaries.json` appended.
        #[arg(long)]
        unitaries: Option<PathBuf>,
    },
    /// Count degree-m products of the linearization variables.
    Count {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(short, long, default_value_t = 2)]
        m: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Phase,
    Certificates,
    Search,
}

#[derive(Args)]
struct CompareFlags {
    /// Relative tolerance for invariant comparisons.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Relative tolerance for clustering singular values.
    #[arg(long, default_value_t = DEFAULT_CLUSTER_TOL)]
    deg_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Search iterations per restart.
    #[arg(long, default_value_t = 2000)]
    budget: usize,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// 1-based mode whose unfolding lays out the segments; the last by default.
    #[arg(long)]
    segment_vec_mode: Option<usize>,
    /// Largest party subset whose reduced spectrum is compared.
    #[arg(long, default_value_t = 2)]
    max_subset: usize,
}

impl CompareFlags {
    fn options(&self) -> CompareOptions {
        CompareOptions {
            tol: self.tol,
            deg_tol: self.deg_tol,
            seed: self.seed,
            restarts: self.restarts,
            iterations: self.budget,
            strategy: match self.mode {
                ModeArg::Auto => Strategy::Auto,
                ModeArg::Phase => Strategy::Phase,
                ModeArg::Certificates => Strategy::Certificates,
                ModeArg::Search => Strategy::Search,
            },
            marginal_max_subset: self.max_subset,
            segment_vec_mode: None,
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Canon { input, output } => commands::canon(&input, &output, &mut stdout),
        Command::Compare {
            first,
            second,
            flags,
        } => {
            let report =
                commands::compare(&first, &second, flags.options(), flags.segment_vec_mode)?;
            writeln!(stdout, "{}", serde_json::to_string_pretty(&report)?)?;
            Ok(report.exit_code())
        }
        Command::Purify {
            input,
            output,
            rank_tol,
        } => commands::purify(&input, &output, rank_tol, &mut stdout),
        Command::Trace0 { input, output } => commands::trace0(&input, &output),
        Command::Random {
            dims,
            seed,
            rank,
            output,
        } => {
            let doc = commands::random(&dims, seed, rank)?;
            match output {
                Some(path) => files::write_json(&path, &doc)?,
                None => writeln!(stdout, "{}", serde_json::to_string_pretty(&doc)?)?,
            }
            Ok(0)
        }
        Command::Rotate {
            input,
            seed,
            output,
            unitaries,
        } => {
            let sidecar = unitaries.unwrap_or_else(|| {
                let mut name = output.clone().into_os_string();
                name.push(".unitaries.json");
                PathBuf::from(name)
            });
            commands::rotate(&input, seed, &output, &sidecar)
        }
        Command::Count { dims, m } => commands::count(&dims, m, &mut stdout),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            match e.chain().find_map(|c| c.downcast_ref::<lucanon::Error>()) {
                Some(kind) => eprintln!("error[{}]: {e:#}", kind.kind()),
                None => eprintln!("error: {e:#}"),
            }
            ExitCode::from(2)
        }
    }
}
