//! Thin command-line front end over [`accel_alloc::cli`].
//!
//! Exit codes: 0 on success, 1 on any error, 2 when the run finished but
//! its primary artifact reports an infeasible (or missing) design.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use accel_alloc::cli::{
    cmd_evaluate, cmd_report, cmd_search, cmd_sweep, cmd_twostage, RunManifest, SearchMethod,
};
use accel_alloc::config::ToolConfig;
use accel_alloc::search_space::{DataflowChoice, Deployment, Objective};
use accel_alloc::{Error, Result};

#[derive(Parser)]
#[command(
    name = "accel-alloc",
    about = "Per-layer hardware resource allocation for DNN accelerators",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Built-in model name (toy2, toy3, mobilenet_v2_like) or a path to a
    /// model JSON file
    #[arg(long)]
    model: String,
    /// Dataflow style: dla, eye, shi, or mix (searched per layer)
    #[arg(long, default_value = "dla")]
    dataflow: String,
    /// Deployment scenario: lp (per-layer engines) or ls (one shared engine)
    #[arg(long, default_value = "lp")]
    scenario: String,
    /// Objective as metric:aggregation, e.g. latency:sum or energy:max
    #[arg(long, default_value = "latency:sum")]
    objective: String,
    /// Budget: none, area:VALUE, power:VALUE, or counts:PE:BUF
    #[arg(long, conflicts_with = "preset")]
    constraint: Option<String>,
    /// Named area budget from the config (cloud, iot, iotx, unconstrained)
    #[arg(long)]
    preset: Option<String>,
    /// Path to a tool config JSON file (otherwise the ACCEL_ALLOC_CONFIG
    /// environment variable, otherwise built-in defaults)
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Search engine: rl, grid, random, sa, ga, or oracle
    #[arg(long, default_value = "rl")]
    method: String,
    /// Budget: training epochs for rl, genome evaluations for baselines
    #[arg(long, default_value_t = 5000)]
    epochs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step between enumerated points (grid method only)
    #[arg(long, default_value_t = 1)]
    grid_stride: usize,
    /// Policy network core: rnn or mlp
    #[arg(long, default_value = "rnn")]
    policy: String,
    /// Policy hidden width
    #[arg(long, default_value_t = 128)]
    hidden: usize,
    /// Directory for result.json, trace.csv, genome.json
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search and archive its artifacts
    Search(SearchArgs),
    /// Score a genome file and print a per-layer report
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Genome JSON (either index or value representation)
        #[arg(long)]
        genome: PathBuf,
    },
    /// Tabulate one layer's cost across the full level grid
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Layer index within the model
        #[arg(long)]
        layer: usize,
        /// Directory for sweep.csv
        #[arg(long)]
        out: PathBuf,
    },
    /// Policy-gradient search followed by local fine-tuning
    Twostage {
        #[command(flatten)]
        search: SearchArgs,
        /// Fine-tuning generations
        #[arg(long, default_value_t = 2000)]
        tune_generations: u64,
    },
    /// Merge archived result.json files into a comparison CSV
    Report {
        /// result.json files to merge
        inputs: Vec<PathBuf>,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_with<T>(what: &str, parsed: Option<T>, raw: &str, expected: &str) -> Result<T> {
    parsed.ok_or_else(|| {
        Error::InvalidConfig(format!("unknown {} '{}', expected {}", what, raw, expected))
    })
}

fn build_manifest(common: &CommonArgs, cfg: &ToolConfig) -> Result<RunManifest> {
    let mut manifest = RunManifest::new(&common.model, SearchMethod::Oracle);
    manifest.dataflow = parse_with(
        "dataflow",
        DataflowChoice::parse(&common.dataflow),
        &common.dataflow,
        "dla, eye, shi, or mix",
    )?;
    manifest.scenario = parse_with(
        "scenario",
        Deployment::parse(&common.scenario),
        &common.scenario,
        "lp or ls",
    )?;
    manifest.objective = Objective::parse(&common.objective)?;
    manifest.constraint = match (&common.constraint, &common.preset) {
        (Some(text), _) => text.clone(),
        (None, Some(name)) => match cfg.preset(name)? {
            Some(area) => format!("area:{}", area),
            None => "none".to_string(),
        },
        (None, None) => "none".to_string(),
    };
    Ok(manifest)
}

fn apply_search_args(manifest: &mut RunManifest, args: &SearchArgs) -> Result<()> {
    manifest.method = parse_with(
        "method",
        SearchMethod::parse(&args.method),
        &args.method,
        "rl, grid, random, sa, ga, or oracle",
    )?;
    manifest.policy = parse_with(
        "policy",
        accel_alloc::rl::PolicyVariant::parse(&args.policy),
        &args.policy,
        "rnn or mlp",
    )?;
    manifest.epochs = args.epochs;
    manifest.seed = args.seed;
    manifest.grid_stride = args.grid_stride;
    manifest.hidden = args.hidden;
    Ok(())
}

/// Ok(true) = success and feasible; Ok(false) = success but infeasible.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Search(args) => {
            let cfg = ToolConfig::resolve(args.common.config.as_deref())?;
            let mut manifest = build_manifest(&args.common, &cfg)?;
            apply_search_args(&mut manifest, &args)?;
            let record = cmd_search(&manifest, &cfg, &args.out)?;
            println!(
                "{}: best_value={} feasible={} evaluations={} -> {}",
                record.method,
                if record.result.best_value.is_finite() {
                    record.result.best_value.to_string()
                } else {
                    "inf".to_string()
                },
                record.result.feasible,
                record.result.evaluations,
                args.out.display()
            );
            Ok(record.result.feasible)
        }
        Command::Evaluate { common, genome } => {
            let cfg = ToolConfig::resolve(common.config.as_deref())?;
            let manifest = build_manifest(&common, &cfg)?;
            let report = cmd_evaluate(&manifest, &cfg, &genome)?;
            print!("{}", report.to_json());
            Ok(report.feasible)
        }
        Command::Sweep { common, layer, out } => {
            let cfg = ToolConfig::resolve(common.config.as_deref())?;
            let manifest = build_manifest(&common, &cfg)?;
            let table = cmd_sweep(&manifest, &cfg, layer, &out)?;
            println!("{} rows -> {}", table.rows.len(), out.join("sweep.csv").display());
            Ok(true)
        }
        Command::Twostage {
            search,
            tune_generations,
        } => {
            let cfg = ToolConfig::resolve(search.common.config.as_deref())?;
            let mut manifest = build_manifest(&search.common, &cfg)?;
            apply_search_args(&mut manifest, &search)?;
            manifest.tune_generations = tune_generations;
            let report = cmd_twostage(&manifest, &cfg, &search.out)?;
            print!("{}", serde_json::to_string_pretty(&report).unwrap());
            println!();
            Ok(!report.fine_tuning_skipped && report.stage2_feasible == Some(true))
        }
        Command::Report { inputs, out } => {
            let (csv, warnings) = cmd_report(&inputs)?;
            for w in &warnings {
                eprintln!("warning: {}", w);
            }
            match out {
                Some(path) => std::fs::write(&path, &csv).map_err(|e| Error::io(&path, e))?,
                None => print!("{}", csv),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{}", e.render());
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{}", e.render());
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}
