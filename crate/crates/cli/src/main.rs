use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use serde_json::json;

use mzk_cli::config::Experiment;
use mzk_cli::output::{output_dir, write_run, OUT_ROOT_VAR};
use mzk_cli::{parse_config, run};

/// Exit codes: 0 all assertions hold, 1 some assertion failed, 2 invalid
/// configuration, 3 the run itself failed.
#[derive(Parser, Debug)]
#[command(name = "mzk", version, about = "Experiments for the complex modified Zakharov-Kuznetsov equation on the 2-torus")]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,

    /// TOML run configuration (must set schema_version).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; defaults to $MZK_OUT_ROOT/<experiment>.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for all random data; overrides the config.
    #[arg(long)]
    seed: Option<u64>,

    /// Override a config key, e.g. `--set solver.dt=1e-3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    let cfg = match parse_config(&text, cli.experiment, &overrides) {
        Ok(c) => c,
        Err(errors) => {
            println!("{}", json!({ "experiment": cli.experiment.name(), "config_errors": errors.0 }));
            for e in &errors.0 {
                eprintln!("error: {e}");
            }
            return ExitCode::from(2);
        }
    };
    for w in cfg.warnings(cli.experiment) {
        eprintln!("warning: {w}");
    }

    let dir = output_dir(cli.out.as_deref(), &cfg, cli.experiment, std::env::var_os(OUT_ROOT_VAR).map(PathBuf::from));
    let result = run(cli.experiment, &cfg).and_then(|out| {
        write_run(&dir, &cfg, &out).context("writing run directory")?;
        Ok(out)
    });
    let out = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(3);
        }
    };

    eprintln!("{} finished in {:.2} s; results in {}", cli.experiment, out.report.wall_clock_seconds, dir.display());
    if out.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("{}", json!({ "experiment": cli.experiment.name(), "failures": out.failures }));
        ExitCode::from(1)
    }
}
