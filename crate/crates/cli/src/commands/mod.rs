//! Subcommand implementations and the stable exit-code contract:
//! 0 success, 2 input validation, 3 backend failure, 4 partial per-file
//! failure (anything else is an internal error, exit 1).

use algaeval_core::baseline::ColorThresholds;
use algaeval_core::metrics::format_percent;
use thiserror::Error;

pub mod baseline_detect;
pub mod benchmark;
pub mod evaluate;
pub mod split;
pub mod visualize;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Backend(String),
    #[error("{0}")]
    Partial(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Backend(_) => 3,
            CliError::Partial(_) => 4,
            CliError::Internal(_) => 1,
        }
    }

    pub fn validation(err: impl std::fmt::Display) -> Self {
        CliError::Validation(err.to_string())
    }
}

pub fn write_output(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    crate::util::write_atomic(path, text.as_bytes())
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

/// Detector tuning flags shared by `baseline-detect` and `benchmark`.
#[derive(Debug, clap::Args)]
pub struct ThresholdArgs {
    /// Lower hue bound in degrees [0, 360)
    #[arg(long, default_value_t = 70.0)]
    pub hue_low: f64,
    /// Upper hue bound in degrees [0, 360); below --hue-low wraps around 0
    #[arg(long, default_value_t = 170.0)]
    pub hue_high: f64,
    /// Minimum HSV saturation in [0, 1]
    #[arg(long, default_value_t = 0.25)]
    pub saturation_min: f64,
    /// Minimum HSV value in [0, 1]
    #[arg(long, default_value_t = 0.15)]
    pub value_min: f64,
    /// Discard blobs smaller than this fraction of the image area
    #[arg(long, default_value_t = 0.001)]
    pub min_area_fraction: f64,
}

impl ThresholdArgs {
    pub fn thresholds(&self) -> Result<ColorThresholds, CliError> {
        let t = ColorThresholds {
            hue_low: self.hue_low,
            hue_high: self.hue_high,
            saturation_min: self.saturation_min,
            value_min: self.value_min,
        };
        t.validate().map_err(CliError::validation)?;
        Ok(t)
    }
}

fn cell(value: Option<String>) -> String {
    value.unwrap_or_else(|| "-".to_string())
}

/// One-row summary table with the Accuracy / Precision / Recall / mAP / FPS
/// column layout shared by `evaluate` and `benchmark`.
pub fn print_summary_row(
    label: &str,
    accuracy: Option<f64>,
    precision: Option<f64>,
    recall: Option<f64>,
    map: Option<f64>,
    fps: Option<f64>,
) {
    let pct = |v: Option<f64>| v.map(|f| format!("{}%", format_percent(f)));
    println!(
        "{:<18} {:>9} {:>10} {:>8} {:>8} {:>7}",
        "", "Accuracy", "Precision", "Recall", "mAP", "FPS"
    );
    println!(
        "{:<18} {:>9} {:>10} {:>8} {:>8} {:>7}",
        label,
        cell(pct(accuracy)),
        cell(pct(precision)),
        cell(pct(recall)),
        cell(pct(map)),
        cell(fps.map(|f| format!("{f:.2}"))),
    );
}
