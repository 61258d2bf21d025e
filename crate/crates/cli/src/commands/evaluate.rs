//! `algaeval evaluate` — match a detections file against a manifest and emit
//! the evaluation report plus PR curve CSV.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use algaeval_core::dataset::{DatasetManifest, SplitAssignment, SplitKind};
use algaeval_core::metrics::{detections_from_json, evaluate, ApMethod, EvalConfig, Evaluation};

use super::{print_summary_row, write_output, CliError};

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    /// Dataset manifest JSON with ground truth
    #[arg(long)]
    pub manifest: PathBuf,
    /// Detections JSON produced by a detector backend
    #[arg(long)]
    pub detections: PathBuf,
    /// Optional split assignment; restricts evaluation to --subset
    #[arg(long)]
    pub split: Option<PathBuf>,
    /// Which subset to evaluate when --split is given (train|val|test)
    #[arg(long, default_value = "test")]
    pub subset: String,
    /// IoU above which (strictly) a detection can match ground truth
    #[arg(long, default_value_t = 0.5)]
    pub iou_threshold: f64,
    /// Score above which (strictly) an image counts as a positive
    #[arg(long, default_value_t = 0.5)]
    pub score_threshold: f64,
    /// AP integration shown in the summary mAP column (continuous|eleven-point);
    /// the report always carries both
    #[arg(long, default_value = "continuous")]
    pub ap_method: String,
    /// Where to write the evaluation report JSON
    #[arg(long)]
    pub report: PathBuf,
    /// Where to write the PR curve CSV; with several evaluable classes the
    /// class name is appended before the extension
    #[arg(long)]
    pub pr_csv: Option<PathBuf>,
}

fn csv_path_for_class(base: &Path, class: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = base
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}-{class}{ext}"))
}

pub fn run(args: &EvaluateArgs) -> Result<(), CliError> {
    let ap_method: ApMethod = args
        .ap_method
        .parse()
        .map_err(|e| CliError::Validation(format!("--ap-method: {e}")))?;
    let manifest = DatasetManifest::load(&args.manifest).map_err(CliError::validation)?;
    let detections_text =
        std::fs::read_to_string(&args.detections).map_err(|e| {
            CliError::Validation(format!("cannot read {}: {e}", args.detections.display()))
        })?;
    let detections = detections_from_json(&detections_text).map_err(CliError::validation)?;

    let filter: Option<HashSet<String>> = match &args.split {
        None => None,
        Some(path) => {
            let kind: SplitKind = args
                .subset
                .parse()
                .map_err(|e| CliError::Validation(format!("--subset: {e}")))?;
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read {}: {e}", path.display()))
            })?;
            let assignment = SplitAssignment::from_json(&text).map_err(CliError::validation)?;
            Some(assignment.subset(kind).map(str::to_string).collect())
        }
    };

    let config = EvalConfig {
        iou_threshold: args.iou_threshold,
        score_threshold: args.score_threshold,
    };
    let Evaluation { report, curves } =
        evaluate(&manifest, &detections, filter.as_ref(), &config)
            .map_err(CliError::validation)?;

    write_output(&args.report, &(report.to_json() + "\n"))?;
    if let Some(csv_base) = &args.pr_csv {
        let classes: Vec<&String> = report.per_class_ap.keys().collect();
        for class in &classes {
            let label_id = manifest
                .label_map
                .id_of(class)
                .expect("per_class_ap keys come from the label map");
            let curve = &curves[&label_id];
            let path = if classes.len() == 1 {
                csv_base.clone()
            } else {
                csv_path_for_class(csv_base, class)
            };
            write_output(&path, &curve.to_csv())?;
        }
    }

    let map = match ap_method {
        ApMethod::ContinuousArea => report.map_continuous,
        ApMethod::ElevenPoint => report.map_eleven_point,
    };
    let label = args
        .detections
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "evaluation".into());
    print_summary_row(
        &label,
        report.accuracy,
        report.precision,
        report.recall,
        Some(map),
        None,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_suffix_lands_before_the_extension() {
        assert_eq!(
            csv_path_for_class(Path::new("/tmp/pr.csv"), "algae"),
            PathBuf::from("/tmp/pr-algae.csv")
        );
        assert_eq!(
            csv_path_for_class(Path::new("curves"), "duckweed"),
            PathBuf::from("curves-duckweed")
        );
    }
}
