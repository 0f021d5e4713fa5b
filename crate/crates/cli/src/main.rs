use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use curlcurl_cli::output::{create_dir, write_file, Report};
use curlcurl_cli::{experiments, CliError, Experiment, RunConfig};
use serde_json::json;

const THREADS_ENV: &str = "CURLCURL_THREADS";

#[derive(Parser, Debug)]
#[command(name = "curlcurl", version, about = "Nehari ground states and curl-curl fields, batch experiments")]
struct Args {
    experiment: Experiment,
    #[arg(long)]
    config: PathBuf,
    /// Overrides `run.output_dir`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads; beats `run.threads`, which beats $CURLCURL_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

fn thread_count(args: &Args, cfg: &RunConfig) -> Result<Option<usize>, CliError> {
    if let Some(n) = args.threads.or(cfg.run.threads) {
        if n == 0 {
            return Err(CliError::Config("`--threads` must be at least 1".into()));
        }
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

#[cfg(feature = "parallel")]
fn install_pool(threads: Option<usize>) -> usize {
    if let Some(n) = threads {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    rayon::current_num_threads()
}

#[cfg(not(feature = "parallel"))]
fn install_pool(_threads: Option<usize>) -> usize {
    1
}

fn write_outputs(
    cfg: &RunConfig,
    experiment: Experiment,
    outcome: &Result<Report, CliError>,
    wallclock: f64,
    threads: usize,
) -> Result<(), CliError> {
    let dir = &cfg.run.output_dir;
    create_dir(dir)?;
    let mut summary = json!({
        "version": concat!("curlcurl ", env!("CARGO_PKG_VERSION")),
        "experiment": experiment.name(),
        "wallclock_seconds": wallclock,
        "threads": threads,
        "config": cfg,
        "config_toml": cfg.to_toml(),
    });
    match outcome {
        Ok(report) => {
            for table in &report.tables {
                write_file(dir, &format!("{}.csv", table.name), &table.to_bytes())?;
            }
            if cfg.run.emit_fields {
                for (name, bytes) in &report.fields {
                    write_file(dir, name, bytes)?;
                }
            }
            summary["status"] = json!(if report.converged { "converged" } else { "not-converged" });
            summary["results"] = report.results.clone().into();
        }
        Err(e) => {
            summary["status"] = json!(if e.exit_code() == 2 { "not-converged" } else { "failed" });
            summary["error"] = json!(e.to_string());
        }
    }
    let text = serde_json::to_string_pretty(&summary).expect("summary serialises");
    write_file(dir, "summary.json", text.as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut cfg = match RunConfig::load(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("curlcurl: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(name) = cfg.experiment.name {
        if name != args.experiment {
            eprintln!(
                "curlcurl: config error: `experiment.name` is {:?} but the subcommand is {:?}",
                name.name(),
                args.experiment.name()
            );
            return ExitCode::from(1);
        }
    }
    if let Some(dir) = &args.output {
        cfg.run.output_dir = dir.clone();
    }
    let threads = match thread_count(&args, &cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("curlcurl: {e}");
            return ExitCode::from(1);
        }
    };
    let used = install_pool(threads);

    let start = Instant::now();
    let outcome = experiments::run(args.experiment, &cfg);
    let wallclock = start.elapsed().as_secs_f64();
    if let Err(e) = write_outputs(&cfg, args.experiment, &outcome, wallclock, used) {
        eprintln!("curlcurl: {e}");
        return ExitCode::from(1);
    }
    match outcome {
        Ok(report) if report.converged => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("curlcurl: solver stopped at its iteration cap; best iterates written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("curlcurl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
