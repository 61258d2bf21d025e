//! `algaeval benchmark` — throughput and latency of a detector backend over
//! a frame list.

use std::path::PathBuf;

use algaeval_core::runtime::{
    backend_timeout, benchmark, BenchmarkError, BuiltinBaselineBackend, DetectorBackend,
    FrameRequest, ProcessBackend,
};

use crate::util::expand_frames;

use super::{print_summary_row, write_output, CliError, ThresholdArgs};

#[derive(Debug, clap::Args)]
pub struct BenchmarkArgs {
    /// External backend command line, whitespace-split; speaks the
    /// newline-delimited JSON protocol on stdin/stdout
    #[arg(long, conflicts_with = "builtin_baseline")]
    pub backend_cmd: Option<String>,
    /// Benchmark the in-process color-heuristic detector
    #[arg(long)]
    pub builtin_baseline: bool,
    /// Frame files or directories (directories expand to sorted .ppm/.png)
    #[arg(required = true)]
    pub frames: Vec<PathBuf>,
    /// Frames completed before the wall clock starts
    #[arg(long, default_value_t = 10)]
    pub warmup: usize,
    /// Requests allowed in flight at once (1 = serial)
    #[arg(long, default_value_t = 1)]
    pub max_in_flight: usize,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    /// Where to write the benchmark report JSON
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn run(args: &BenchmarkArgs) -> Result<(), CliError> {
    let frames = expand_frames(&args.frames).map_err(CliError::Validation)?;
    let requests: Vec<FrameRequest> = frames
        .iter()
        .map(|path| FrameRequest::new(path, FrameRequest::id_for_path(path)))
        .collect();

    let mut backend: Box<dyn DetectorBackend> = if args.builtin_baseline {
        Box::new(BuiltinBaselineBackend::new(
            args.thresholds.thresholds()?,
            args.thresholds.min_area_fraction,
        ))
    } else {
        let cmd = args.backend_cmd.as_deref().ok_or_else(|| {
            CliError::Validation("choose a backend: --backend-cmd or --builtin-baseline".into())
        })?;
        let mut parts = cmd.split_whitespace();
        let program = parts.next().ok_or_else(|| {
            CliError::Validation("--backend-cmd: empty command".into())
        })?;
        let backend_args: Vec<String> = parts.map(str::to_string).collect();
        Box::new(
            ProcessBackend::spawn(program, &backend_args, backend_timeout())
                .map_err(|e| CliError::Backend(e.to_string()))?,
        )
    };

    let report = benchmark(
        backend.as_mut(),
        &requests,
        args.warmup,
        args.max_in_flight,
    )
    .map_err(|e| match e {
        BenchmarkError::Aborted(msg) => CliError::Backend(msg),
        other => CliError::Validation(other.to_string()),
    })?;

    if let Some(path) = &args.report {
        write_output(path, &(report.to_json() + "\n"))?;
    }
    print_summary_row("benchmark", None, None, None, None, Some(report.fps));
    println!(
        "latency p50 {:.2} ms, p95 {:.2} ms over {} frames (warmup {}, max in flight {}, {} frame errors)",
        report.latency_p50_ms,
        report.latency_p95_ms,
        report.frames_total - report.frames_warmup,
        report.frames_warmup,
        report.max_in_flight,
        report.frame_errors,
    );
    Ok(())
}
