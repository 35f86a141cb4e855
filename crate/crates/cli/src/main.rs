use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pairwalk::config::{ExperimentSpec, Overrides};
use pairwalk::output::ErrorDocument;
use pairwalk::runner::{self, RunError};
use pairwalk::{presets, validate, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "pairwalk", version, about = "Two-particle driven quantum walk simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a spec JSON file, or a built-in preset name
    /// (fig1, fig2, fig3, fig4a, fig4b).
    spec: String,
    /// Halve n_sites and t_final (CI scale).
    #[arg(long)]
    fast: bool,
    /// Output directory (default: spec `output.dir`, then $PAIRWALK_OUT_DIR,
    /// then ./out).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override the integrator time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the lattice size.
    #[arg(long)]
    n_sites: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single run (any sweep section in the spec is ignored).
    Run(RunArgs),
    /// Execute the full sweep grid of a spec.
    Sweep(RunArgs),
    /// Run the built-in oracle cross-checks and invariant suite.
    Validate,
}

fn load_spec(arg: &str, args: &RunArgs) -> Result<ExperimentSpec, ErrorDocument> {
    let text = if let Some(embedded) = presets::lookup(arg) {
        embedded.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| {
            ErrorDocument::config("(spec)", &format!("cannot read `{arg}`: {e}"))
        })?
    };
    let mut spec = ExperimentSpec::from_json(&text)
        .map_err(|e| ErrorDocument::config(&e.field, &e.message))?;
    spec.apply_overrides(&Overrides { fast: args.fast, dt: args.dt, n_sites: args.n_sites });
    spec.validate().map_err(|e| ErrorDocument::config(&e.field, &e.message))?;
    Ok(spec)
}

fn out_dir_for(spec: &ExperimentSpec, args: &RunArgs) -> PathBuf {
    let base = args
        .out_dir
        .clone()
        .or_else(|| spec.output.as_ref().and_then(|o| o.dir.clone()).map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    match &spec.name {
        Some(name) => base.join(name),
        None => base,
    }
}

fn fail(doc: ErrorDocument) -> ExitCode {
    let code = doc.exit_code;
    doc.print();
    ExitCode::from(code as u8)
}

fn run_error(e: RunError) -> ExitCode {
    match e {
        RunError::Config(c) => fail(ErrorDocument::config(&c.field, &c.message)),
        other => fail(ErrorDocument::engine(&other.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let mut spec = match load_spec(&args.spec, &args) {
                Ok(s) => s,
                Err(doc) => return fail(doc),
            };
            spec.sweep = None;
            let dir = out_dir_for(&spec, &args);
            match runner::run_single(&spec, &dir) {
                Ok(summary) => {
                    let f = &summary.final_record;
                    println!(
                        "ok: {} steps to t={}, wall {:.2}s, norm drift {:.2e}, \
                         final centroid {:.3}, artifacts in {}",
                        (spec.integrator.t_final / spec.integrator.dt).round(),
                        spec.integrator.t_final,
                        summary.wall_time_seconds,
                        summary.max_norm_drift,
                        f.centroid_1,
                        summary.out_dir.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => run_error(e),
            }
        }
        Command::Sweep(args) => {
            let spec = match load_spec(&args.spec, &args) {
                Ok(s) => s,
                Err(doc) => return fail(doc),
            };
            let dir = out_dir_for(&spec, &args);
            match runner::run_sweep(&spec, &dir, args.threads) {
                Ok(rows) => {
                    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
                    println!(
                        "sweep done: {} points, {} failed, aggregate in {}",
                        rows.len(),
                        failed,
                        dir.join(pairwalk::output::SWEEP_FILE).display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => run_error(e),
            }
        }
        Command::Validate => {
            if validate::report(&validate::run_suite()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
