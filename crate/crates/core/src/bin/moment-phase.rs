use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use moment_phase::formats::parse_directions;
use moment_phase::pipeline::{exit_code_for_error, run_pipeline, PipelineConfig, PipelineKind};
use moment_phase::{Error, Result};

/// Reconstruct a measure from its moments: condition, solve for the phase,
/// invert.
#[derive(Parser, Debug)]
#[command(name = "moment-phase", version)]
struct Args {
    /// Moment file (JSON).
    input: PathBuf,
    #[arg(long, default_value = "line")]
    pipeline: PipelineKind,
    /// Output grid size (power of two).
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    /// Maxent tolerance on the moment residual.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Budget of single-coordinate solver updates.
    #[arg(long, default_value_t = 100_000)]
    max_sweeps: usize,
    /// Zero-padding factor for Hilbert transforms.
    #[arg(long, default_value_t = 4)]
    pad: usize,
    /// Preconditioning offset.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Solve on the raw moments (negative control).
    #[arg(long)]
    skip_condition: bool,
    /// Direction list for the raybeam pipeline.
    #[arg(long)]
    directions: Option<PathBuf>,
    /// JSON config; its fields override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    output: PathBuf,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(args: Args) -> Result<i32> {
    let mut config = PipelineConfig {
        pipeline: args.pipeline,
        grid: args.grid,
        tol: args.tol,
        max_sweeps: args.max_sweeps,
        pad: args.pad,
        delta: args.delta,
        skip_condition: args.skip_condition,
        output_dir: Some(args.output),
        ..Default::default()
    };
    if let Some(path) = &args.directions {
        config.directions = parse_directions(&read(path)?)?;
    }
    if let Some(path) = &args.config {
        config.apply_json(&read(path)?)?;
    }
    let input = std::fs::read(&args.input).map_err(|e| Error::Io(format!("{}: {e}", args.input.display())))?;
    let outcome = run_pipeline(&config, &input)?;
    let dir = config.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    outcome.write_to(&dir)?;
    let r = &outcome.report;
    eprintln!("pipeline {:?}: {:?}", r.pipeline, r.status);
    if let Some(s) = &r.solver {
        eprintln!(
            "solver: converged={} updates={} residual={:e}",
            s.dual.converged, s.dual.iterations, s.dual.residual_norm
        );
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for_error(&e) as u8)
        }
    }
}
