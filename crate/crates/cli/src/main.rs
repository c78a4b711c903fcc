use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swarmsec_cli::{
    commands::best_line, load_config, run_eval, run_optimize, run_sweep, run_validate, write_eval, write_surface,
    write_sweep, write_validation, CliError, Z_LIMIT,
};

#[derive(Parser)]
#[command(name = "swarmsec", version, about = "Secrecy outage analysis for a wireless-powered UAV swarm relay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; overrides the config's `output`, stdout if neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// SOP for every requested scheme, jamming flag and method.
    Eval(Common),
    /// CSV over one swept parameter.
    Sweep(Common),
    /// Analytic against Monte Carlo z-scores; exits 4 on a breach.
    Validate(Common),
    /// Corridor grid search; writes the surface and prints the best cell.
    Optimize(Common),
}

fn sink(path: Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(&p).map_err(|e| CliError::Output(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (Command::Eval(c) | Command::Sweep(c) | Command::Validate(c) | Command::Optimize(c)) = &cli.command;
    if let Some(n) = c.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let mut cfg = load_config(&c.config)?;
    if let Some(s) = c.seed {
        cfg.monte_carlo.seed = s;
    }
    let out = c.out.clone().or_else(|| cfg.output.clone());
    match &cli.command {
        Command::Eval(_) => {
            let rows = run_eval(&cfg)?;
            write_eval(&rows, sink(out)?)?;
        }
        Command::Sweep(_) => {
            let rows = run_sweep(&cfg)?;
            write_sweep(&rows, sink(out)?)?;
        }
        Command::Validate(_) => {
            let report = run_validate(&cfg)?;
            write_validation(&report, sink(out)?)?;
            if report.max_z > Z_LIMIT {
                eprintln!("validation failed: max z-score {} exceeds {Z_LIMIT}", report.max_z);
                return Ok(4);
            }
        }
        Command::Optimize(_) => {
            let result = run_optimize(&cfg)?;
            for f in &result.failures {
                eprintln!(
                    "warning: cell along={} H={} heading={} skipped: {}",
                    f.along, f.altitude, f.heading, f.error
                );
            }
            write_surface(&result, sink(out)?)?;
            println!("{}", best_line(&result));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
