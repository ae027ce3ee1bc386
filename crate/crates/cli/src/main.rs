//! `holodist` experiment runner.
//!
//! Exit codes: 0 all checks passed, 1 config error, 2 an inequality suite
//! flagged an unboundable or unstable constant, 3 solver failures above
//! the configured fraction.

mod config;
mod describe;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use holodist::{DomainGeometry, Error};
use serde_json::json;

use config::{Resolved, Task};

/// Version of the summary layout and CSV columns.
const SCHEMA_VERSION: u32 = 1;
const SCHEMA: &str = include_str!("../schema/summary.schema.json");

#[derive(Parser)]
#[command(
    name = "holodist",
    version,
    about = "Invariant distance experiments on model domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config task.
        #[arg(long, value_enum)]
        task: Option<Task>,
        /// Worker threads; all cores when absent.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        quiet: bool,
    },
    /// Print a geometry summary of a domain, given as a JSON file or
    /// inline JSON.
    Describe { domain: String },
    /// Print the JSON schema of run summaries.
    Schema,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            task,
            threads,
            quiet,
        } => run(config, seed, out, task, threads, quiet),
        Command::Describe { domain } => match parse_domain(&domain) {
            Ok(d) => {
                print!("{}", describe::describe(&d));
                ExitCode::SUCCESS
            }
            Err(msg) => {
                eprintln!("{msg}");
                ExitCode::from(1)
            }
        },
        Command::Schema => {
            print!("{SCHEMA}");
            ExitCode::SUCCESS
        }
    }
}

fn parse_domain(arg: &str) -> Result<DomainGeometry, String> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| format!("invalid domain: {e}"))
}

fn run(
    path: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
    task: Option<Task>,
    threads: Option<usize>,
    quiet: bool,
) -> ExitCode {
    let resolved = match config::load(&path).and_then(|cfg| config::resolve(cfg, task, seed, out)) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(1);
        }
    };
    if let Some(n) = threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("config error: cannot start {n} worker threads");
            return ExitCode::from(1);
        }
    }
    let outcome = match tasks::run(&resolved) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(match e {
                Error::Solver { .. } | Error::Rejected { .. } => 3,
                _ => 1,
            });
        }
    };
    let code = exit_code(&resolved, &outcome);
    match write_reports(&resolved, &outcome, code) {
        Ok(files) => {
            if !quiet {
                println!(
                    "{}: {} rows, {} failures, exit {code}; wrote {files}",
                    resolved.task.name(),
                    outcome.rows,
                    outcome.failures
                );
                for flag in &outcome.flags {
                    println!("flag: {flag}");
                }
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("cannot write reports: {e}");
            ExitCode::from(1)
        }
    }
}

fn exit_code(r: &Resolved, o: &tasks::Outcome) -> u8 {
    let fraction = if o.rows == 0 {
        0.0
    } else {
        o.failures as f64 / o.rows as f64
    };
    if fraction > r.cfg.limits.failure_fraction {
        3
    } else if !o.flags.is_empty() {
        2
    } else {
        0
    }
}

fn write_reports(r: &Resolved, o: &tasks::Outcome, code: u8) -> std::io::Result<String> {
    let dir = &r.cfg.output.dir;
    std::fs::create_dir_all(dir)?;
    let stem = r.stem();
    let csv_name = format!("{stem}.csv");
    let summary_name = format!("{stem}.summary.json");
    std::fs::write(dir.join(&csv_name), &o.csv)?;
    let status = match code {
        0 => "ok",
        2 => "flagged",
        _ => "solver_failures",
    };
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "task": r.task.name(),
        "domain": r.cfg.domain,
        "seed": r.seed,
        "csv": csv_name,
        "columns": tasks::columns(r.task),
        "rows": o.rows,
        "failures": o.failures,
        "flags": o.flags,
        "status": status,
        "exit_code": code,
        "results": o.results,
    });
    let mut text = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(dir.join(&summary_name), text)?;
    Ok(format!(
        "{} and {}",
        dir.join(csv_name).display(),
        dir.join(summary_name).display()
    ))
}
