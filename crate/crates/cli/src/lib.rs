//! The `evidal` command line: dataset fetching, uncertainty landscapes,
//! active-learning batches and their statistical reports.
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use evidal_core::datasets::SyntheticKind;
use evidal_core::stats::{Alternative, CdParams};
use evidal_core::uncertainty::{KlirParams, UncertaintyKind, DEFAULT_RL_RESOLUTION};

pub mod commands;
pub mod error;
pub mod spec;

pub use error::{exit_code, SchemaError, ValidationError, EXIT_INVALID, EXIT_OK, EXIT_RUNTIME};
pub use spec::{load_experiment_spec, parse_experiment_spec, ExperimentSpec, ResolvedExperiment};

/// Package version plus `git describe` output when built from a checkout.
pub const VERSION: &str = env!("EVIDAL_VERSION");

#[derive(Debug, Parser)]
#[command(name = "evidal", version = VERSION, about = "Belief-function uncertainty sampling for active learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Download and verify benchmark datasets listed in the manifest.
    Fetch {
        /// Datasets to fetch (default: all).
        names: Vec<String>,
        /// Target directory (default: $EVIDAL_DATA_DIR, else the bundled data directory).
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Alternative manifest file.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Rasterize an uncertainty measure over a synthetic 2-D dataset.
    Landscape {
        #[arg(long, value_parser = parse_kind)]
        kind: SyntheticKind,
        #[arg(long, default_value = "klir", value_parser = parse_measure)]
        measure: UncertaintyKind,
        /// Weight of non-specificity in the Klir measure.
        #[arg(long, default_value_t = KlirParams::DEFAULT_LAMBDA)]
        lambda: f64,
        /// Grid nodes per side.
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// Training points.
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 7)]
        k: usize,
        #[arg(long, default_value_t = 0.95)]
        alpha0: f64,
        /// Distance scale of the evidential K-NN (default: inverse mean squared distance).
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_enum, default_value_t = commands::landscape::Classifier::Evidential)]
        classifier: commands::landscape::Classifier,
        /// Share of the data range added around the points.
        #[arg(long, default_value_t = 0.1)]
        margin: f64,
        /// Grid resolution of the relative-likelihood measures.
        #[arg(long, default_value_t = DEFAULT_RL_RESOLUTION)]
        rl_resolution: usize,
        #[arg(long, default_value = "landscape")]
        out: PathBuf,
    },
    /// Run an experiment spec (see docs/config.md).
    AlRun {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the spec's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: available cores, capped by the repetitions).
        #[arg(long)]
        parallelism: Option<usize>,
        /// Overrides the spec's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-repetition wall-clock times to timings.csv.
        #[arg(long)]
        timings: bool,
    },
    /// Mean-AUAC table with t-tests, plus critical-difference data.
    Report {
        /// results.json files or directories containing one.
        #[arg(required = true)]
        results: Vec<PathBuf>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
        #[command(flatten)]
        cd: CdArgs,
    },
    /// Friedman test, Wilcoxon–Holm comparisons and critical-difference cliques.
    Cd {
        #[arg(required = true)]
        results: Vec<PathBuf>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
        #[command(flatten)]
        cd: CdArgs,
    },
    /// Run the built-in invariant suite.
    Selfcheck,
}

#[derive(Debug, clap::Args)]
struct CdArgs {
    /// Significance level of the pairwise tests.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = Sided::TwoSided)]
    alternative: Sided,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sided {
    TwoSided,
    OneSided,
}

impl From<CdArgs> for CdParams {
    fn from(args: CdArgs) -> Self {
        let alternative = match args.alternative {
            Sided::TwoSided => Alternative::TwoSided,
            Sided::OneSided => Alternative::OneSided,
        };
        CdParams {
            alpha: args.alpha,
            alternative,
        }
    }
}

fn parse_kind(s: &str) -> Result<SyntheticKind, String> {
    s.parse::<SyntheticKind>().map_err(|e| e.to_string())
}

fn parse_measure(s: &str) -> Result<UncertaintyKind, String> {
    UncertaintyKind::parse(s).ok_or_else(|| {
        let names: Vec<&str> = UncertaintyKind::ALL.iter().map(|k| k.name()).collect();
        format!(
            "unknown measure `{s}`; expected one of {}",
            names.join(", ")
        )
    })
}

/// Parses `argv` (including the program name), runs the subcommand and returns
/// the exit status: 0 on success, 2 on usage or validation errors, 1 otherwise.
pub fn run_subcommand<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Fetch {
            names,
            dir,
            manifest,
        } => commands::fetch::run(commands::fetch::FetchArgs {
            names,
            dir,
            manifest,
        }),
        Command::Landscape {
            kind,
            measure,
            lambda,
            resolution,
            n,
            noise,
            seed,
            k,
            alpha0,
            gamma,
            classifier,
            margin,
            rl_resolution,
            out,
        } => commands::landscape::run(commands::landscape::LandscapeArgs {
            kind,
            measure,
            lambda,
            resolution,
            n,
            noise,
            seed,
            k,
            alpha0,
            gamma,
            classifier,
            margin,
            rl_resolution,
            out,
        })
        .map(|_| ()),
        Command::AlRun {
            config,
            seed,
            parallelism,
            out,
            timings,
        } => commands::al_run::run(commands::al_run::AlRunArgs {
            config,
            seed,
            parallelism,
            out,
            timings,
        }),
        Command::Report { results, out, cd } => {
            commands::report::run_report(commands::report::ReportArgs {
                results,
                out,
                cd: cd.into(),
            })
        }
        Command::Cd { results, out, cd } => {
            commands::report::run_cd(commands::report::ReportArgs {
                results,
                out,
                cd: cd.into(),
            })
        }
        Command::Selfcheck => commands::selfcheck::run(),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
