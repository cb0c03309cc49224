use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use noisebench_cli::{builtin_config, hv, plotdata, posthoc, run_campaign, stats, CampaignConfig, CliError, RunOptions};
use noisebench_core::acceptance::{run_profile, Profile};
use noisebench_core::Sense;

#[derive(Parser)]
#[command(name = "noisebench", version, about = "Noisy multi-objective optimization benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign and write its tables into the output directory.
    Run {
        /// Campaign configuration (JSON).
        #[arg(long, conflicts_with = "profile", required_unless_present = "profile")]
        config: Option<PathBuf>,
        /// Use a shipped configuration: quick, paper-n10, paper-n30 or full.
        #[arg(long)]
        profile: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (defaults to the available cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides the configured base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Include decision vectors in fronts.csv.
        #[arg(long)]
        genotypes: bool,
        /// Also run cells marked long-running.
        #[arg(long)]
        include_long: bool,
    },
    /// Analyze the final populations of a finished campaign.
    Posthoc {
        #[arg(value_enum)]
        mode: PosthocMode,
        #[arg(long)]
        out: PathBuf,
        /// Restrict to these run ids (repeatable).
        #[arg(long = "run")]
        runs: Vec<String>,
        /// Draws per member for `sample`.
        #[arg(long, default_value_t = 100)]
        k: usize,
        /// Noise strength for `sample`; defaults to each run's own.
        #[arg(long)]
        eps2: Option<f64>,
        /// Seed for `sample`; defaults to the campaign's base seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Box-plot statistics and pairwise rank-sum tests over runs.csv.
    Stats {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Select rows of a campaign table for plotting.
    Plotdata {
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated key=value filters, e.g. `kind=analytic,case=...`.
        #[arg(long, default_value = "")]
        select: String,
        /// Table to select from.
        #[arg(long, default_value = "fronts.csv")]
        table: String,
        /// Write here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Hypervolume of the points in a CSV file.
    Hv {
        #[arg(long)]
        front: PathBuf,
        /// Reference point, comma-separated.
        #[arg(long = "ref", allow_hyphen_values = true)]
        reference: String,
        #[arg(long, value_enum, default_value_t = SenseArg::Min)]
        sense: SenseArg,
    },
    /// Run the acceptance checks and report one line per criterion.
    Selftest {
        /// quick, paper-n10, paper-n30 or full.
        #[arg(long, default_value = "quick")]
        profile: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PosthocMode {
    Reeval,
    Sample,
    Reconstruct,
    Ellipse,
}

#[derive(Clone, Copy, ValueEnum)]
enum SenseArg {
    Min,
    Max,
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, profile, out, workers, seed, genotypes, include_long } => {
            let (campaign, path) = match (config, profile) {
                (Some(path), _) => (CampaignConfig::load(&path)?, path),
                (None, Some(name)) => (builtin_config(&name)?, PathBuf::from(format!("<builtin {name}>"))),
                (None, None) => unreachable!("clap requires one of --config and --profile"),
            };
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if workers == 0 {
                return Err(CliError::Usage("--workers must be positive".into()));
            }
            let start = Instant::now();
            let opts = RunOptions { out: out.clone(), workers, seed, genotypes, include_long };
            let report = run_campaign(&campaign, &path, &opts)?;
            println!(
                "{} cells ({} long-running skipped): {} runs executed, {} reused, {:.1} s; tables in {}",
                report.cells,
                report.skipped_cells,
                report.executed,
                report.reused,
                start.elapsed().as_secs_f64(),
                out.display()
            );
        }
        Command::Posthoc { mode, out, runs, k, eps2, seed } => {
            let rows = match mode {
                PosthocMode::Reeval => posthoc::reevaluate(&out, &runs)?,
                PosthocMode::Sample => {
                    let seed = match seed {
                        Some(s) => s,
                        None => {
                            let snapshot = out.join(noisebench_cli::tables::CONFIG_SNAPSHOT);
                            CampaignConfig::load(&snapshot)?.base_seed
                        }
                    };
                    posthoc::sample(&out, &runs, k, eps2, seed)?
                }
                PosthocMode::Reconstruct => posthoc::reconstruct(&out, &runs)?,
                PosthocMode::Ellipse => posthoc::ellipses(&out, &runs)?,
            };
            println!("{rows} rows written");
        }
        Command::Stats { out, alpha } => {
            let report = stats::run_stats(&out, alpha)?;
            print!("{}", report.table);
        }
        Command::Plotdata { out, select, table, output } => {
            let filters = plotdata::parse_selection(&select)?;
            let bytes = plotdata::select(&out.join(&table), &filters)?;
            match output {
                Some(path) => noisebench_cli::tables::write_atomic(&path, &bytes)?,
                None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::io("writing stdout", e))?,
            }
        }
        Command::Hv { front, reference, sense } => {
            let sense = match sense {
                SenseArg::Min => Sense::Minimize,
                SenseArg::Max => Sense::Maximize,
            };
            let r = hv::parse_reference(&reference)?;
            println!("{}", hv::compute(&front, &r, sense)?);
        }
        Command::Selftest { profile } => {
            let profile: Profile = profile.parse().map_err(|e: noisebench_core::Error| CliError::Usage(e.to_string()))?;
            let results = run_profile(profile, |r| println!("{r}"))?;
            let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
            println!("{} of {} criteria passed", results.len() - failed.len(), results.len());
            if !failed.is_empty() {
                return Err(CliError::SelftestFailed(format!("criteria {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
