//! `algaeval visualize` — burn thresholded detections into an image.

use std::path::{Path, PathBuf};

use algaeval_core::dataset::LabelMap;
use algaeval_core::geometry::ScaleMode;
use algaeval_core::imgio::Image;
use algaeval_core::metrics::detections_from_json;
use algaeval_core::runtime::{threshold_and_convert, DetectionBatch, FrameRequest};

use crate::render::{draw_detection, OverlaySpec};
use crate::util::write_atomic;

use super::CliError;

#[derive(Debug, clap::Args)]
pub struct VisualizeArgs {
    /// Input image (PPM or PNG)
    #[arg(long)]
    pub image: PathBuf,
    /// Detections JSON
    #[arg(long)]
    pub detections: PathBuf,
    /// Which image id to pull from the detections file (default: file stem)
    #[arg(long)]
    pub image_id: Option<String>,
    /// Only draw detections scoring strictly above this
    #[arg(long, default_value_t = 0.5)]
    pub score_threshold: f64,
    /// Overlay color as r,g,b bytes
    #[arg(long, default_value = "0,255,0")]
    pub color: String,
    /// Outline thickness in pixels (>= 1)
    #[arg(long, default_value_t = 2)]
    pub stroke: u32,
    /// Scale all four coordinates by image width (the single-dimension
    /// convention some pipelines use) instead of width/height per axis
    #[arg(long)]
    pub paper_compat: bool,
    /// Label map in id:name lines, for label text (default: 1:algae)
    #[arg(long)]
    pub label_map: Option<PathBuf>,
    /// Output image; format follows the extension (.ppm or .png)
    #[arg(long)]
    pub output: PathBuf,
}

fn parse_color(text: &str) -> Result<[u8; 3], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected r,g,b bytes, got {text:?}"));
    }
    let mut rgb = [0u8; 3];
    for (v, p) in rgb.iter_mut().zip(&parts) {
        *v = p
            .trim()
            .parse()
            .map_err(|_| format!("bad channel value {:?}", p.trim()))?;
    }
    Ok(rgb)
}

fn encode_for(image: &Image, path: &Path) -> Result<Vec<u8>, CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("ppm") => image.encode_ppm().map_err(CliError::validation),
        Some("png") => image.encode_png().map_err(CliError::validation),
        _ => Err(CliError::Validation(format!(
            "unsupported output extension for {} (use .ppm or .png)",
            path.display()
        ))),
    }
}

pub fn run(args: &VisualizeArgs) -> Result<(), CliError> {
    if args.stroke == 0 {
        return Err(CliError::Validation("--stroke must be >= 1".into()));
    }
    let color = parse_color(&args.color).map_err(|e| CliError::Validation(format!("--color: {e}")))?;
    let mut image = Image::load(&args.image).map_err(CliError::validation)?;
    if image.channels() != 3 {
        return Err(CliError::Validation(format!(
            "{}: overlays need a three-channel image",
            args.image.display()
        )));
    }
    let detections_text = std::fs::read_to_string(&args.detections).map_err(|e| {
        CliError::Validation(format!("cannot read {}: {e}", args.detections.display()))
    })?;
    let detections = detections_from_json(&detections_text).map_err(CliError::validation)?;
    let label_map = match &args.label_map {
        None => LabelMap::algae(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read {}: {e}", path.display()))
            })?;
            LabelMap::from_text(&text).map_err(CliError::validation)?
        }
    };

    let image_id = args
        .image_id
        .clone()
        .unwrap_or_else(|| FrameRequest::id_for_path(&args.image));
    let mut batch = DetectionBatch::empty(&image_id);
    for d in detections.iter().filter(|d| d.image_id == image_id) {
        batch.boxes.push(d.bbox.to_wire());
        batch.scores.push(d.score);
        batch.classes.push(d.label_id);
        batch.num_detections += 1;
    }

    let mode = if args.paper_compat {
        ScaleMode::WidthAll
    } else {
        ScaleMode::PerAxis
    };
    let retained = threshold_and_convert(&batch, image.size(), args.score_threshold, mode)
        .map_err(CliError::validation)?;

    let spec = OverlaySpec {
        color,
        stroke: args.stroke,
    };
    for boxed in &retained {
        let label = label_map
            .name_of(boxed.label_id)
            .map(str::to_string)
            .unwrap_or_else(|| format!("class-{}", boxed.label_id));
        draw_detection(&mut image, boxed, &label, &spec);
    }

    let bytes = encode_for(&image, &args.output)?;
    write_atomic(&args.output, &bytes)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", args.output.display())))?;
    eprintln!(
        "drew {} of {} detections for {image_id:?} -> {}",
        retained.len(),
        batch.num_detections,
        args.output.display()
    );
    Ok(())
}
