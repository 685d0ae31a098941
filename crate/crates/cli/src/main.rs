//! Config-driven command line front end: declare a manifold and fields in a
//! JSON file, run verification, classification and integration tasks, and
//! write machine-readable reports.
//!
//! Exit codes: 0 all checks pass; 1 a verification check failed its
//! tolerance; 2 configuration or usage error; 3 numerical failure
//! (singular metric, excluded region, sampling exhaustion).

mod config;
mod report;
mod tasks;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use config::{RunConfig, TaskSpec};
use report::TaskReport;
use tasks::{TaskError, TaskResult, TaskStatus};

#[derive(Parser)]
#[command(name = "atlift", version, about = "Transport lifts on the tangent bundle: verification, classification and integration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every task in a JSON run configuration.
    Run(RunArgs),
    /// Execute only the integrate tasks of a configuration.
    Integrate(RunArgs),
    /// List the built-in manifold catalog.
    Catalog {
        /// Output format: text or json.
        #[arg(long, default_value = "text")]
        format: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration.
    config: PathBuf,
    /// Override the sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override every pass/fail tolerance with one value.
    #[arg(long)]
    tol: Option<f64>,
    /// Directory for reports and trajectory CSVs.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Console output format: text or json.
    #[arg(long)]
    format: Option<String>,
}

const EXIT_VERIFICATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(&args, false),
        Command::Integrate(args) => run(&args, true),
        Command::Catalog { format } => catalog_command(&format),
    }
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("configuration error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn run(args: &RunArgs, integrate_only: bool) -> ExitCode {
    let bytes = match std::fs::read(&args.config) {
        Ok(bytes) => bytes,
        Err(e) => return config_error(format!("cannot read {}: {e}", args.config.display())),
    };
    let config_hash = hex_digest(&bytes);

    let mut run_config: RunConfig = match serde_json::from_slice(&bytes) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(e),
    };
    if let Some(seed) = args.seed {
        run_config.sampling.seed = seed;
    }
    if let Some(tol) = args.tol {
        run_config.tolerances.identity = tol;
        run_config.tolerances.algebra = tol;
        run_config.tolerances.classify = tol;
    }
    if let Some(dir) = &args.out_dir {
        run_config.output.dir = dir.display().to_string();
    }
    if let Some(format) = &args.format {
        run_config.output.format = format.clone();
    }
    if run_config.output.format != "text" && run_config.output.format != "json" {
        return config_error(format!(
            "unknown output format `{}` (expected text or json)",
            run_config.output.format
        ));
    }

    let resolved = match run_config.resolve() {
        Ok(rc) => rc,
        Err(e) => return config_error(e),
    };

    let selected: Vec<(usize, &TaskSpec)> = run_config
        .tasks
        .iter()
        .enumerate()
        .map(|(i, t)| (i + 1, t))
        .filter(|(_, t)| !integrate_only || matches!(t, TaskSpec::Integrate { .. }))
        .collect();
    if selected.is_empty() {
        return config_error("no matching tasks in configuration");
    }

    let out_dir = Path::new(&run_config.output.dir);
    if let Err(e) = std::fs::create_dir_all(out_dir) {
        return config_error(format!("cannot create {}: {e}", out_dir.display()));
    }

    let manifold_name = resolved.metric.name().unwrap_or("inline").to_string();
    let mut reports = Vec::new();
    let mut numerical_failure = false;
    let mut verification_failure = false;

    for (index, task) in selected {
        let result = match tasks::run_task(&resolved, task, index) {
            Ok(result) => result,
            Err(TaskError::Config(e)) => return config_error(e),
            Err(TaskError::Numerical(e)) => {
                let mut r = TaskResult {
                    status: TaskStatus::Error,
                    error: Some(e.0),
                    details: serde_json::Value::Null,
                    artifacts: Vec::new(),
                };
                r.details = serde_json::json!({});
                r
            }
        };
        match result.status {
            TaskStatus::Pass => {}
            TaskStatus::Fail => verification_failure = true,
            TaskStatus::Error => numerical_failure = true,
        }
        for (name, contents) in &result.artifacts {
            if let Err(e) = std::fs::write(out_dir.join(name), contents) {
                return config_error(format!("cannot write artifact {name}: {e}"));
            }
        }
        let report = TaskReport::new(
            &config_hash,
            resolved.seed,
            &manifold_name,
            resolved.tolerances,
            task.name(),
            index,
            &result,
        );
        if let Err(e) = std::fs::write(out_dir.join(report.file_name()), report.to_json()) {
            return config_error(format!("cannot write report: {e}"));
        }
        reports.push(report);
    }

    if run_config.output.format == "json" {
        let summary: Vec<_> = reports
            .iter()
            .map(|r| {
                serde_json::json!({
                    "index": r.index,
                    "task": r.task,
                    "status": r.status,
                    "file": r.file_name(),
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "manifold": manifold_name,
                "seed": resolved.seed,
                "config_hash": config_hash,
                "tasks": summary,
            }))
            .expect("summary serializes")
        );
    } else {
        println!("manifold: {manifold_name}   seed: {}", resolved.seed);
        println!("config hash: {config_hash}");
        for report in &reports {
            print!("{}", report.render_text());
        }
    }

    if numerical_failure {
        ExitCode::from(EXIT_NUMERICAL)
    } else if verification_failure {
        ExitCode::from(EXIT_VERIFICATION)
    } else {
        ExitCode::SUCCESS
    }
}

fn catalog_command(format: &str) -> ExitCode {
    let entries = atlift::catalog::entries();
    match format {
        "json" => {
            let items: Vec<_> = entries
                .iter()
                .map(|e| {
                    let params: serde_json::Map<String, serde_json::Value> = e
                        .params
                        .iter()
                        .map(|(k, v)| ((*k).to_string(), serde_json::json!(v)))
                        .collect();
                    serde_json::json!({
                        "name": e.name,
                        "description": e.description,
                        "dimension": e.dimension,
                        "coordinates": e.coords,
                        "metric_upper": e.metric_upper,
                        "domain": e.domain,
                        "parameters": params,
                        "sample_box": e.sample_box,
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&items).expect("catalog serializes")
            );
        }
        "text" => {
            for e in entries {
                println!("{} ({}D): {}", e.name, e.dimension, e.description);
                println!("    coordinates: {}", e.coords.join(", "));
                if !e.params.is_empty() {
                    let params: Vec<String> =
                        e.params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                    println!("    parameters: {}", params.join(", "));
                }
                if !e.domain.is_empty() {
                    println!("    admitted region: {}", e.domain.join(" and "));
                }
            }
        }
        other => return config_error(format!("unknown format `{other}` (expected text or json)")),
    }
    ExitCode::SUCCESS
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
