//! `sarod`: generate SA-RoD frameworks, analyze rigidity and localizability,
//! and run localization.
//!
//! Exit codes: 0 success or localizable, 2 unlocalizable or ambiguous, 1 usage
//! or data error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "sarod", version, about = "SA-RoD rigidity analysis and sensor network localization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every command that solves or ranks.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Seed for generation and multi-start solvers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative singular-value threshold for numerical ranks.
    #[arg(long, default_value_t = sarod::linalg::DEFAULT_RTOL)]
    pub rtol: f64,
    /// Starts per multi-start round.
    #[arg(long, default_value_t = 20)]
    pub starts: usize,
    /// Upper bound on the total number of multi-start starts.
    #[arg(long, default_value_t = 1000)]
    pub max_starts: usize,
    /// Squared-residual threshold at which a start counts as converged.
    #[arg(long, default_value_t = 1e-16)]
    pub accept_tol: f64,
}

impl RunConfig {
    pub fn solver(&self) -> sarod::snl::SolverConfig {
        sarod::snl::SolverConfig {
            seed: self.seed,
            starts: self.starts,
            max_starts: self.max_starts,
            rtol: self.rtol,
            accept_tol: self.accept_tol,
            ..Default::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a framework from a named recipe and write a network JSON file.
    Generate {
        /// quad2v, quad2v-deficient, bilat-D1A1, mix-D2A1, type2D1, minimal or random.
        #[arg(long)]
        recipe: String,
        /// Number of vertices.
        #[arg(long)]
        n: usize,
        /// Seed for placement and random choices.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated 1-based anchor ids recorded in the file.
        #[arg(long, default_value = "1,2")]
        anchors: String,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report rigidity rank, duality, index-graph components and, with anchors, localizability.
    Analyze {
        /// Network JSON file.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        config: RunConfig,
        /// Skip the localizability verdict (which may run the multi-start solver).
        #[arg(long, default_value_t = false)]
        no_verdict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Localize the free vertices from anchors and SA/RoD measurements.
    Localize {
        #[arg(long)]
        input: PathBuf,
        /// auto, sa, rod or general.
        #[arg(long, default_value = "auto")]
        method: String,
        /// Measurement JSON; synthesized from the file positions when omitted.
        #[arg(long)]
        measurements: Option<PathBuf>,
        #[command(flatten)]
        config: RunConfig,
        /// Result CSV (vertex_id, true_x, true_y, est_x, est_y, err); standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report JSON path.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Include wall-clock times in the report (makes it run-dependent).
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
    /// Decide global rigidity of a four-cycle framework.
    CheckQuad {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a batch of (recipe, n, seeds, method) jobs and write one CSV row per run.
    Report {
        /// Batch JSON: {"runs": [{"recipe": ..., "n": ..., "seeds": [...], "method": ...}]}.
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        config: RunConfig,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fill the runtime_s column (makes the output run-dependent).
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { recipe, n, seed, anchors, out } => commands::generate(&recipe, n, seed, &anchors, out.as_deref()),
        Command::Analyze { input, config, no_verdict, out } => commands::analyze(&input, &config, !no_verdict, out.as_deref()),
        Command::Localize { input, method, measurements, config, out, report, timings } => commands::localize(
            &input,
            &method,
            measurements.as_deref(),
            &config,
            out.as_deref(),
            report.as_deref(),
            timings,
        ),
        Command::CheckQuad { input, out } => commands::check_quad(&input, out.as_deref()),
        Command::Report { spec, config, out, timings } => report::run(&spec, &config, out.as_deref(), timings),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
