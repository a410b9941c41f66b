use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use reprolab::cli::{
    emit_plotdata, list_catalog, load_config, run_experiment, RunOptions, RunStatus,
};
use reprolab::lab::{verify_invariant, Axis, INVARIANT_IDS};
use reprolab::scenarios::Params;
use reprolab::{Error, RngState};

#[derive(Parser)]
#[command(
    name = "reprolab",
    version,
    about = "Deviation experiments for first-order methods with inexact oracles"
)]
struct Cli {
    /// Worker threads for trials.
    #[arg(long, global = true, env = "REPROLAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config (a single point when the grid is empty).
    Run {
        config: PathBuf,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write measured timings into results.csv.
        #[arg(long)]
        record_wallclock: bool,
    },
    /// Run an experiment config whose grid must be non-empty.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        record_wallclock: bool,
    },
    /// Check the structural identities of the lower-bound constructions.
    Invariants {
        /// `all` or one invariant id.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Horizon of the checked iterations.
        #[arg(long = "T", default_value_t = 64)]
        horizon: usize,
        /// Random coefficient matrices per identity.
        #[arg(long, default_value_t = 20)]
        matrices: usize,
    },
    /// Print the scenario catalog as JSON.
    List,
    /// Turn a results.csv into log-log plot data.
    Plotdata {
        results: PathBuf,
        #[arg(long, default_value = "T")]
        axis: String,
        /// Also write an SVG chart to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 5,
        _ => 2,
    }
}

fn run_config(
    config: PathBuf,
    out: Option<PathBuf>,
    record_wallclock: bool,
    sweep: bool,
) -> Result<u8, Error> {
    let mut cfg = load_config(&config)?;
    if sweep && cfg.grid.is_empty() {
        return Err(Error::Config("`sweep` needs a non-empty grid".into()));
    }
    if out.is_some() {
        cfg.output_dir = out;
    }
    let manifest = run_experiment(&cfg, &RunOptions { record_wallclock })?;
    println!(
        "{}",
        serde_json::to_string_pretty(&manifest).expect("manifest serializes")
    );
    if manifest.status == RunStatus::Truncated {
        log::warn!("oracle-call budget reached; the table is partial");
    }
    Ok(manifest.status.exit_code() as u8)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run {
            config,
            out,
            record_wallclock,
        } => run_config(config, out, record_wallclock, false),
        Command::Sweep {
            config,
            out,
            record_wallclock,
        } => run_config(config, out, record_wallclock, true),
        Command::Invariants {
            suite,
            seed,
            horizon,
            matrices,
        } => {
            let ids: Vec<&str> = if suite == "all" {
                INVARIANT_IDS.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let params = Params::from([
                ("T".to_string(), horizon as f64),
                ("matrices".to_string(), matrices as f64),
            ]);
            let rng = RngState::new(seed);
            let mut reports = Vec::new();
            for id in ids {
                reports.push(verify_invariant(id, &params, &rng.derive(id, 0))?);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&reports).expect("reports serialize")
            );
            let failed = reports.iter().any(|r| !r.passed);
            Ok(if failed {
                RunStatus::InvariantFailed.exit_code() as u8
            } else {
                0
            })
        }
        Command::List => {
            println!("{}", list_catalog());
            Ok(0)
        }
        Command::Plotdata { results, axis, svg } => {
            let data = emit_plotdata(&results, Axis::parse(&axis)?)?;
            if let Some(path) = svg {
                std::fs::write(&path, data.to_svg()).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
            }
            print!("{}", data.to_csv());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
        {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
