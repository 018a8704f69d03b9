use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regflux::scenario::{run_config, run_demo, ScenarioConfig};

#[derive(Parser)]
#[command(
    version,
    about = "Run vanishing-viscosity scenarios and write checked artifacts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for independent solves.
    #[arg(long, global = true, env = "REGFLUX_JOBS")]
    jobs: Option<usize>,
    /// Log progress at info level (RUST_LOG overrides).
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one viscous problem with the mild or finite-volume solver.
    Solve(Run),
    /// Run an ε-sweep and test the integrated profiles for the Cauchy property.
    Sweep(Run),
    /// Solve v_t + g(v)_x = 0 and extract a regulated field from it.
    Extract(Run),
    /// Solve the triangular system: v, its certificate, then the u sweep.
    Triangular(Run),
    /// Run comparison, tail, finite-speed and Jensen checks.
    Check(Run),
    /// Run every shipped scenario.
    Demo {
        #[arg(long, default_value = "out/demo")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Run {
    /// Scenario document (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output`, then `out/<name>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or(if cli.verbose { "info" } else { "warn" }),
    )
    .init();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// `Ok(passed)` or an execution error.
fn execute(cli: &Cli) -> Result<bool, Box<dyn std::error::Error>> {
    let (run, kind) = match &cli.command {
        Command::Demo { out } => {
            let outcomes = run_demo(out, cli.jobs)?;
            for o in &outcomes {
                println!(
                    "{} {}",
                    if o.report.passed { "pass" } else { "FAIL" },
                    o.report.name
                );
            }
            return Ok(outcomes.iter().all(|o| o.report.passed));
        }
        Command::Solve(r) => (r, "solve"),
        Command::Sweep(r) => (r, "sweep"),
        Command::Extract(r) => (r, "extract"),
        Command::Triangular(r) => (r, "triangular"),
        Command::Check(r) => (r, "checks"),
    };
    let cfg = ScenarioConfig::from_path(&run.config)?;
    if cfg.task.kind() != kind {
        return Err(format!(
            "{} describes a {} task, not {kind}",
            run.config.display(),
            cfg.task.kind()
        )
        .into());
    }
    let dir = run
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
    let outcome = run_config(&cfg, &dir, cli.jobs)?;
    for c in &outcome.report.checks {
        println!(
            "{} {} = {}{}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
                .map(|t| format!(" (tolerance {t})"))
                .unwrap_or_default()
        );
    }
    println!("artifacts in {}", dir.display());
    Ok(outcome.report.passed)
}
