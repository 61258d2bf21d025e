//! `algaeval baseline-detect` — run the color-heuristic detector over images
//! and write a detections file.

use std::path::PathBuf;

use algaeval_core::baseline::detect;
use algaeval_core::imgio::Image;
use algaeval_core::metrics::{detections_to_json, Detection};
use algaeval_core::runtime::FrameRequest;

use crate::util::expand_one;

use super::{write_output, CliError, ThresholdArgs};

#[derive(Debug, clap::Args)]
pub struct BaselineDetectArgs {
    /// Image files or directories; each image's id is its file stem
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    /// Where to write the detections JSON
    #[arg(long)]
    pub output: PathBuf,
}

pub fn run(args: &BaselineDetectArgs) -> Result<(), CliError> {
    let thresholds = args.thresholds.thresholds()?;

    // a missing or unreadable input is a per-file failure, not a hard stop
    let mut images = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for input in &args.images {
        match expand_one(input) {
            Ok(paths) => images.extend(paths),
            Err(message) => {
                eprintln!("{message}");
                failures.push(input.display().to_string());
            }
        }
    }
    let total = images.len() + failures.len();

    let mut detections: Vec<Detection> = Vec::new();
    for path in &images {
        let image_id = FrameRequest::id_for_path(path);
        let result = Image::load(path)
            .map_err(|e| e.to_string())
            .and_then(|image| {
                detect(&image, &thresholds, args.thresholds.min_area_fraction, &image_id)
                    .map_err(|e| e.to_string())
            })
            .and_then(|batch| batch.to_detections().map_err(|e| e.to_string()));
        match result {
            Ok(batch) => detections.extend(batch),
            Err(message) => {
                eprintln!("{}: {message}", path.display());
                failures.push(path.display().to_string());
            }
        }
    }

    write_output(&args.output, &(detections_to_json(&detections) + "\n"))?;
    println!(
        "{} detections from {} of {} images -> {}",
        detections.len(),
        total - failures.len(),
        total,
        args.output.display()
    );
    if !failures.is_empty() {
        return Err(CliError::Partial(format!(
            "{} of {total} images failed: {}",
            failures.len(),
            failures.join(", ")
        )));
    }
    Ok(())
}
