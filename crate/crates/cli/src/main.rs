//! `algaeval` — evaluate, benchmark, and visualize algae detection systems.

use clap::{Parser, Subcommand};

mod commands;
mod font;
mod render;
mod util;

use commands::{baseline_detect, benchmark, evaluate, split, visualize};

#[derive(Parser)]
#[command(
    name = "algaeval",
    version,
    about = "Evaluation and benchmarking toolkit for algae detection systems",
    after_help = "Exit codes: 0 success, 2 input validation, 3 backend failure, \
                  4 partial per-file failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assign manifest images to train/val/test deterministically
    Split(split::SplitArgs),
    /// Score a detections file against ground truth (mAP, PR, classification)
    Evaluate(evaluate::EvaluateArgs),
    /// Draw thresholded detections onto an image
    Visualize(visualize::VisualizeArgs),
    /// Measure a detector backend's throughput and latency
    Benchmark(benchmark::BenchmarkArgs),
    /// Run the built-in color-heuristic detector over images
    BaselineDetect(baseline_detect::BaselineDetectArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Split(args) => split::run(args),
        Command::Evaluate(args) => evaluate::run(args),
        Command::Visualize(args) => visualize::run(args),
        Command::Benchmark(args) => benchmark::run(args),
        Command::BaselineDetect(args) => baseline_detect::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
