//! Detection-to-ground-truth matching, precision-recall curves, AP/mAP, and
//! image-level classification metrics.
//!
//! Matching is greedy in descending score order: a detection is a true
//! positive only if its best-IoU same-class ground truth clears the IoU
//! threshold (strictly) and is still unmatched; among several detections
//! overlapping one ground truth only the highest-scored counts, the rest are
//! duplicate false positives. Curves pool detections across all evaluated
//! images of a split, and AP is the area under the monotone precision
//! envelope (with eleven-point interpolation available as an alternative).
//!
//! Matching is independent per image and may run in parallel; curve and AP
//! construction are sequential, deterministic reductions over the pooled
//! result.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetManifest, ImageEntry};
use crate::geometry::{BoundingBox, GeometryError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("detections parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("detection references unknown image {0:?}")]
    UnknownImage(String),
    #[error("detection {index} for image {image_id:?}: {reason}")]
    InvalidDetection {
        index: usize,
        image_id: String,
        reason: String,
    },
    #[error("iou threshold {0} out of range (0, 1]")]
    InvalidIouThreshold(f64),
    #[error("score threshold {0} out of range [0, 1]")]
    InvalidScoreThreshold(f64),
    #[error("no class has any ground-truth instance; mAP is undefined")]
    NoEvaluableClass,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One detector output: image, class, confidence, and a normalized box.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub image_id: String,
    pub label_id: u32,
    pub score: f64,
    pub bbox: BoundingBox,
}

impl Detection {
    pub fn new(
        image_id: impl Into<String>,
        label_id: u32,
        score: f64,
        bbox: BoundingBox,
    ) -> Result<Self, MetricsError> {
        let image_id = image_id.into();
        if !(0.0..=1.0).contains(&score) || !score.is_finite() {
            return Err(MetricsError::InvalidDetection {
                index: 0,
                image_id,
                reason: format!("score {score} out of [0, 1]"),
            });
        }
        if bbox.space() != crate::geometry::CoordSpace::Normalized {
            return Err(MetricsError::InvalidDetection {
                index: 0,
                image_id,
                reason: "detection boxes must be normalized".into(),
            });
        }
        Ok(Self {
            image_id,
            label_id,
            score,
            bbox,
        })
    }
}

// Serde mirror of the detections file: boxes ride in the
// [y_min, x_min, y_max, x_max] wire order.
#[derive(Serialize, Deserialize)]
struct DetectionsDoc {
    detections: Vec<DetectionDoc>,
}

#[derive(Serialize, Deserialize)]
struct DetectionDoc {
    image_id: String,
    label_id: u32,
    score: f64,
    #[serde(rename = "box")]
    bbox: [f64; 4],
}

/// Parse the detections JSON format, preserving input order.
pub fn detections_from_json(text: &str) -> Result<Vec<Detection>, MetricsError> {
    let doc: DetectionsDoc = serde_json::from_str(text)?;
    let mut out = Vec::with_capacity(doc.detections.len());
    for (index, d) in doc.detections.into_iter().enumerate() {
        let bbox = BoundingBox::from_wire_normalized(d.bbox).map_err(|e| {
            MetricsError::InvalidDetection {
                index,
                image_id: d.image_id.clone(),
                reason: e.to_string(),
            }
        })?;
        if !(0.0..=1.0).contains(&d.score) || !d.score.is_finite() {
            return Err(MetricsError::InvalidDetection {
                index,
                image_id: d.image_id,
                reason: format!("score {} out of [0, 1]", d.score),
            });
        }
        out.push(Detection {
            image_id: d.image_id,
            label_id: d.label_id,
            score: d.score,
            bbox,
        });
    }
    Ok(out)
}

/// Canonical pretty-printed detections JSON.
pub fn detections_to_json(detections: &[Detection]) -> String {
    let doc = DetectionsDoc {
        detections: detections
            .iter()
            .map(|d| DetectionDoc {
                image_id: d.image_id.clone(),
                label_id: d.label_id,
                score: d.score,
                bbox: d.bbox.to_wire(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("detections serialization cannot fail")
}

/// How a matched detection was classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchOutcome {
    TruePositive,
    /// The best-overlapping ground truth was already claimed by a
    /// higher-scored detection.
    FalsePositiveDuplicate,
    /// No same-class ground truth cleared the IoU threshold.
    FalsePositiveNoMatch,
}

/// One detection's matching verdict, with enough context to pool curves
/// across images deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedDetection {
    pub image_id: String,
    /// Position of the detection in the per-image input list.
    pub input_index: usize,
    pub label_id: u32,
    pub score: f64,
    pub outcome: MatchOutcome,
    /// Index of the referenced ground-truth box within the image entry, for
    /// true positives and duplicates.
    pub matched_gt: Option<usize>,
    /// IoU against the best same-class ground truth (0 when there is none).
    pub iou: f64,
}

/// Per-image matching result, ordered by descending score.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchResult {
    pub entries: Vec<MatchedDetection>,
}

impl MatchResult {
    pub fn true_positives(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.outcome == MatchOutcome::TruePositive)
            .count()
    }
}

/// Greedily match one image's detections against its ground truth.
///
/// Detections are visited in descending score order (ties by input order).
/// Each ground-truth box is claimed by at most one true positive.
pub fn match_detections(
    detections: &[Detection],
    image: &ImageEntry,
    iou_threshold: f64,
) -> Result<MatchResult, MetricsError> {
    if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
        return Err(MetricsError::InvalidIouThreshold(iou_threshold));
    }
    for d in detections {
        if d.image_id != image.id {
            return Err(MetricsError::UnknownImage(d.image_id.clone()));
        }
    }

    // ground truth compared in normalized space, where detections live
    let gt_boxes: Vec<(u32, BoundingBox)> = image
        .ground_truth
        .iter()
        .map(|gt| Ok((gt.label_id, gt.bbox.normalize(image.size)?)))
        .collect::<Result<_, GeometryError>>()?;

    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by(|&a, &b| {
        detections[b]
            .score
            .partial_cmp(&detections[a].score)
            .expect("scores are finite")
            .then(a.cmp(&b))
    });

    let mut gt_taken = vec![false; gt_boxes.len()];
    let mut entries = Vec::with_capacity(detections.len());
    for idx in order {
        let det = &detections[idx];
        let mut best: Option<(usize, f64)> = None;
        for (gt_idx, (label, gt_box)) in gt_boxes.iter().enumerate() {
            if *label != det.label_id {
                continue;
            }
            let overlap = det.bbox.iou(gt_box)?;
            let better = match best {
                None => true,
                Some((_, best_iou)) => overlap > best_iou,
            };
            if better {
                best = Some((gt_idx, overlap));
            }
        }
        let (outcome, matched_gt, iou) = match best {
            Some((gt_idx, overlap)) if overlap > iou_threshold => {
                if gt_taken[gt_idx] {
                    (MatchOutcome::FalsePositiveDuplicate, Some(gt_idx), overlap)
                } else {
                    gt_taken[gt_idx] = true;
                    (MatchOutcome::TruePositive, Some(gt_idx), overlap)
                }
            }
            Some((_, overlap)) => (MatchOutcome::FalsePositiveNoMatch, None, overlap),
            None => (MatchOutcome::FalsePositiveNoMatch, None, 0.0),
        };
        entries.push(MatchedDetection {
            image_id: det.image_id.clone(),
            input_index: idx,
            label_id: det.label_id,
            score: det.score,
            outcome,
            matched_gt,
            iou,
        });
    }
    Ok(MatchResult { entries })
}

/// Matching results pooled across the images of a split.
#[derive(Debug, Clone, Default)]
pub struct PooledMatches {
    pub entries: Vec<MatchedDetection>,
}

impl PooledMatches {
    pub fn pool(results: impl IntoIterator<Item = MatchResult>) -> Self {
        let mut entries: Vec<MatchedDetection> = results
            .into_iter()
            .flat_map(|r| r.entries.into_iter())
            .collect();
        entries.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .expect("scores are finite")
                .then_with(|| a.image_id.cmp(&b.image_id))
                .then_with(|| a.input_index.cmp(&b.input_index))
        });
        Self { entries }
    }
}

/// One precision-recall sample; `rank` is 1-based over the sorted detections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrSample {
    pub rank: usize,
    pub score: f64,
    pub recall: f64,
    pub precision: f64,
}

/// Precision-recall curve for one class, pooled over a split.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PRCurve {
    pub samples: Vec<PrSample>,
    /// Ground-truth boxes of this class over the evaluated images.
    pub positives_total: usize,
}

impl PRCurve {
    /// True when recall is undefined because the split has no ground truth
    /// of this class; AP is defined as 0 in that case.
    pub fn empty_positives(&self) -> bool {
        self.positives_total == 0
    }

    /// CSV export with header `rank,score,recall,precision`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,score,recall,precision\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.rank, s.score, s.recall, s.precision
            ));
        }
        out
    }
}

/// Build the pooled curve for one class. The k-th sample has
/// precision = TP(k)/k and recall = TP(k)/positives_total.
pub fn pr_curve(pooled: &PooledMatches, label_id: u32, positives_total: usize) -> PRCurve {
    let mut samples = Vec::new();
    let mut tp = 0usize;
    let mut rank = 0usize;
    for entry in pooled.entries.iter().filter(|e| e.label_id == label_id) {
        rank += 1;
        if entry.outcome == MatchOutcome::TruePositive {
            tp += 1;
        }
        let recall = if positives_total == 0 {
            0.0
        } else {
            tp as f64 / positives_total as f64
        };
        samples.push(PrSample {
            rank,
            score: entry.score,
            recall,
            precision: tp as f64 / rank as f64,
        });
    }
    PRCurve {
        samples,
        positives_total,
    }
}

/// Integration rule for turning a PR curve into average precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApMethod {
    /// Area under the monotone-envelope step curve.
    #[default]
    ContinuousArea,
    /// Mean interpolated precision at recall 0, 0.1, ..., 1.0.
    ElevenPoint,
}

impl std::str::FromStr for ApMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "continuous" => Ok(ApMethod::ContinuousArea),
            "eleven-point" => Ok(ApMethod::ElevenPoint),
            other => Err(format!(
                "unknown AP method {other:?} (continuous|eleven-point)"
            )),
        }
    }
}

/// Average precision of a curve. Curves with no detections or no ground
/// truth score 0.
pub fn average_precision(curve: &PRCurve, method: ApMethod) -> f64 {
    if curve.samples.is_empty() || curve.empty_positives() {
        return 0.0;
    }
    // envelope[i] = max precision at any recall >= recall[i]
    let n = curve.samples.len();
    let mut envelope = vec![0.0f64; n];
    let mut running = 0.0f64;
    for i in (0..n).rev() {
        running = running.max(curve.samples[i].precision);
        envelope[i] = running;
    }
    match method {
        ApMethod::ContinuousArea => {
            let mut ap = 0.0;
            let mut prev_recall = 0.0;
            for (sample, env) in curve.samples.iter().zip(&envelope) {
                if sample.recall > prev_recall {
                    ap += (sample.recall - prev_recall) * env;
                    prev_recall = sample.recall;
                }
            }
            ap
        }
        ApMethod::ElevenPoint => {
            let mut total = 0.0;
            for step in 0..=10 {
                let level = step as f64 / 10.0;
                // first sample with recall >= level carries the envelope max
                let p = curve
                    .samples
                    .iter()
                    .zip(&envelope)
                    .find(|(s, _)| s.recall >= level)
                    .map(|(_, e)| *e)
                    .unwrap_or(0.0);
                total += p;
            }
            total / 11.0
        }
    }
}

/// Unweighted mean AP over classes with at least one ground-truth instance.
pub fn mean_average_precision(
    per_class: &[(u32, f64, usize)], // (label_id, ap, ground-truth count)
) -> Result<f64, MetricsError> {
    let evaluable: Vec<f64> = per_class
        .iter()
        .filter(|(_, _, gt)| *gt > 0)
        .map(|(_, ap, _)| *ap)
        .collect();
    if evaluable.is_empty() {
        return Err(MetricsError::NoEvaluableClass);
    }
    Ok(evaluable.iter().sum::<f64>() / evaluable.len() as f64)
}

/// Image-level decision rule: positive iff any detection scores strictly
/// above the threshold.
pub fn image_predicted_positive<I>(scores: I, score_threshold: f64) -> bool
where
    I: IntoIterator<Item = f64>,
{
    scores.into_iter().any(|s| s > score_threshold)
}

/// Image-level confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    #[serde(rename = "tp")]
    pub true_positives: usize,
    #[serde(rename = "fp")]
    pub false_positives: usize,
    #[serde(rename = "tn")]
    pub true_negatives: usize,
    #[serde(rename = "fn")]
    pub false_negatives: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        Self {
            true_positives: tp,
            false_positives: fp,
            true_negatives: tn,
            false_negatives: fn_,
        }
    }

    pub fn total(&self) -> usize {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }
}

/// Derived classification metrics as fractions in [0, 1]. Ratios with a zero
/// denominator are `None` (reported as not-applicable, never 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationMetrics {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

pub fn classification_metrics(counts: &ConfusionCounts) -> ClassificationMetrics {
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    ClassificationMetrics {
        accuracy: ratio(
            counts.true_positives + counts.true_negatives,
            counts.total(),
        ),
        precision: ratio(
            counts.true_positives,
            counts.true_positives + counts.false_positives,
        ),
        recall: ratio(
            counts.true_positives,
            counts.true_positives + counts.false_negatives,
        ),
    }
}

/// Render a fraction as a percentage with exactly two decimals, truncating
/// rather than rounding (52.083% prints as "52.08", 48.0769% as "48.07").
pub fn format_percent(fraction: f64) -> String {
    let basis_points = (fraction * 10_000.0) as i64;
    format!("{}.{:02}", basis_points / 100, (basis_points % 100).abs())
}

/// AP under both integration rules for one class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassAp {
    pub continuous: f64,
    pub eleven_point: f64,
}

/// The full evaluation output. Serializes with the stable field names
/// `map_continuous`, `map_eleven_point`, `per_class_ap`, `iou_threshold`,
/// `score_threshold`, `accuracy`, `precision`, `recall`, `counts`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub map_continuous: f64,
    pub map_eleven_point: f64,
    /// Keyed by class name; only classes with ground truth appear.
    pub per_class_ap: BTreeMap<String, ClassAp>,
    pub iou_threshold: f64,
    pub score_threshold: f64,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub counts: ConfusionCounts,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, MetricsError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Evaluation thresholds; defaults are IoU 0.5 and score 0.5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub iou_threshold: f64,
    pub score_threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_threshold: 0.5,
            score_threshold: 0.5,
        }
    }
}

/// Report plus the per-class curves it was derived from.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: EvalReport,
    /// Curves keyed by label id, for classes with ground truth or detections.
    pub curves: BTreeMap<u32, PRCurve>,
}

/// Evaluate a detection set against a manifest.
///
/// When `image_filter` is given, only those images are evaluated (detections
/// on other images are ignored). Detections naming an image absent from the
/// manifest are an error. The score threshold feeds the image-level
/// classification decision only; PR curves always use every detection.
pub fn evaluate(
    manifest: &DatasetManifest,
    detections: &[Detection],
    image_filter: Option<&HashSet<String>>,
    config: &EvalConfig,
) -> Result<Evaluation, MetricsError> {
    if !(config.iou_threshold > 0.0 && config.iou_threshold <= 1.0) {
        return Err(MetricsError::InvalidIouThreshold(config.iou_threshold));
    }
    if !(0.0..=1.0).contains(&config.score_threshold) {
        return Err(MetricsError::InvalidScoreThreshold(config.score_threshold));
    }

    let by_id: HashMap<&str, &ImageEntry> = manifest
        .images
        .iter()
        .map(|img| (img.id.as_str(), img))
        .collect();
    let evaluated: Vec<&ImageEntry> = manifest
        .images
        .iter()
        .filter(|img| image_filter.is_none_or(|f| f.contains(&img.id)))
        .collect();

    let mut per_image: HashMap<&str, Vec<Detection>> = HashMap::new();
    for d in detections {
        if !by_id.contains_key(d.image_id.as_str()) {
            return Err(MetricsError::UnknownImage(d.image_id.clone()));
        }
        per_image.entry(d.image_id.as_str()).or_default().push(d.clone());
    }

    let empty: Vec<Detection> = Vec::new();
    let mut results = Vec::with_capacity(evaluated.len());
    let mut counts = ConfusionCounts::default();
    for img in &evaluated {
        let dets = per_image.get(img.id.as_str()).unwrap_or(&empty);
        results.push(match_detections(dets, img, config.iou_threshold)?);

        let predicted =
            image_predicted_positive(dets.iter().map(|d| d.score), config.score_threshold);
        let actual = !img.ground_truth.is_empty();
        match (predicted, actual) {
            (true, true) => counts.true_positives += 1,
            (true, false) => counts.false_positives += 1,
            (false, false) => counts.true_negatives += 1,
            (false, true) => counts.false_negatives += 1,
        }
    }
    let pooled = PooledMatches::pool(results);

    let mut gt_per_class: BTreeMap<u32, usize> = BTreeMap::new();
    for img in &evaluated {
        for gt in &img.ground_truth {
            *gt_per_class.entry(gt.label_id).or_default() += 1;
        }
    }
    let mut detected_classes: HashSet<u32> = pooled.entries.iter().map(|e| e.label_id).collect();
    detected_classes.extend(gt_per_class.keys().copied());

    let mut curves = BTreeMap::new();
    let mut per_class_ap = BTreeMap::new();
    let mut continuous_aps = Vec::new();
    let mut eleven_point_aps = Vec::new();
    for label_id in detected_classes {
        let gt_count = gt_per_class.get(&label_id).copied().unwrap_or(0);
        let curve = pr_curve(&pooled, label_id, gt_count);
        let continuous = average_precision(&curve, ApMethod::ContinuousArea);
        let eleven_point = average_precision(&curve, ApMethod::ElevenPoint);
        if gt_count > 0 {
            let name = manifest
                .label_map
                .name_of(label_id)
                .map(str::to_string)
                .unwrap_or_else(|| label_id.to_string());
            per_class_ap.insert(
                name,
                ClassAp {
                    continuous,
                    eleven_point,
                },
            );
        }
        continuous_aps.push((label_id, continuous, gt_count));
        eleven_point_aps.push((label_id, eleven_point, gt_count));
        curves.insert(label_id, curve);
    }
    let map_continuous = mean_average_precision(&continuous_aps)?;
    let map_eleven_point = mean_average_precision(&eleven_point_aps)?;

    let derived = classification_metrics(&counts);
    Ok(Evaluation {
        report: EvalReport {
            map_continuous,
            map_eleven_point,
            per_class_ap,
            iou_threshold: config.iou_threshold,
            score_threshold: config.score_threshold,
            accuracy: derived.accuracy,
            precision: derived.precision,
            recall: derived.recall,
            counts,
        },
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{GroundTruthBox, LabelMap};
    use crate::geometry::ImageSize;

    fn image_with_gt(id: &str, boxes: &[(f64, f64, f64, f64)]) -> ImageEntry {
        ImageEntry {
            id: id.to_string(),
            path: format!("{id}.ppm"),
            size: ImageSize::new(100, 100).unwrap(),
            ground_truth: boxes
                .iter()
                .map(|&(x0, y0, x1, y1)| GroundTruthBox {
                    label_id: 1,
                    bbox: BoundingBox::pixel(x0, y0, x1, y1).unwrap(),
                })
                .collect(),
        }
    }

    fn det(id: &str, score: f64, x0: f64, y0: f64, x1: f64, y1: f64) -> Detection {
        Detection::new(id, 1, score, BoundingBox::normalized(x0, y0, x1, y1).unwrap()).unwrap()
    }

    #[test]
    fn single_overlapping_detection_is_tp() {
        let img = image_with_gt("a", &[(10.0, 10.0, 50.0, 50.0)]);
        // detection box equals GT in normalized coordinates -> IoU 1.0
        let d = det("a", 0.9, 0.1, 0.1, 0.5, 0.5);
        let m = match_detections(&[d], &img, 0.5).unwrap();
        assert_eq!(m.entries[0].outcome, MatchOutcome::TruePositive);
        assert!(m.entries[0].iou > 0.9);
    }

    #[test]
    fn second_detection_on_same_gt_is_duplicate() {
        let img = image_with_gt("a", &[(10.0, 10.0, 50.0, 50.0)]);
        let d1 = det("a", 0.9, 0.1, 0.1, 0.5, 0.5);
        let d2 = det("a", 0.8, 0.12, 0.1, 0.5, 0.5);
        let m = match_detections(&[d1, d2], &img, 0.5).unwrap();
        assert_eq!(m.entries[0].outcome, MatchOutcome::TruePositive);
        assert_eq!(m.entries[1].outcome, MatchOutcome::FalsePositiveDuplicate);
        assert_eq!(m.entries[1].matched_gt, Some(0));
    }

    #[test]
    fn detection_without_gt_is_no_match() {
        let img = image_with_gt("a", &[]);
        let d = det("a", 0.7, 0.1, 0.1, 0.3, 0.3);
        let m = match_detections(&[d], &img, 0.5).unwrap();
        assert_eq!(m.entries[0].outcome, MatchOutcome::FalsePositiveNoMatch);
        assert_eq!(m.entries[0].matched_gt, None);
    }

    #[test]
    fn matching_is_class_aware() {
        let mut img = image_with_gt("a", &[(10.0, 10.0, 50.0, 50.0)]);
        img.ground_truth[0].label_id = 2;
        let d = det("a", 0.9, 0.1, 0.1, 0.5, 0.5); // label 1 vs GT label 2
        let m = match_detections(&[d], &img, 0.5).unwrap();
        assert_eq!(m.entries[0].outcome, MatchOutcome::FalsePositiveNoMatch);
    }

    #[test]
    fn iou_exactly_at_threshold_is_not_a_match() {
        let img = image_with_gt("a", &[(0.0, 0.0, 50.0, 100.0)]);
        // detection covers the right half: overlap with left half is 1/3... use
        // a box equal to the GT's left half -> IoU = 0.5 exactly
        let d = det("a", 0.9, 0.0, 0.0, 0.25, 1.0);
        let m = match_detections(&[d], &img, 0.5).unwrap();
        assert_eq!(m.entries[0].iou, 0.5);
        assert_eq!(m.entries[0].outcome, MatchOutcome::FalsePositiveNoMatch);
    }

    #[test]
    fn mismatched_image_id_errors() {
        let img = image_with_gt("a", &[]);
        let d = det("other", 0.7, 0.1, 0.1, 0.3, 0.3);
        assert!(matches!(
            match_detections(&[d], &img, 0.5),
            Err(MetricsError::UnknownImage(_))
        ));
    }

    #[test]
    fn pr_curve_single_tp() {
        let img = image_with_gt("a", &[(10.0, 10.0, 50.0, 50.0)]);
        let d = det("a", 0.9, 0.1, 0.1, 0.5, 0.5);
        let m = match_detections(&[d], &img, 0.5).unwrap();
        let pooled = PooledMatches::pool([m]);
        let curve = pr_curve(&pooled, 1, 1);
        assert_eq!(curve.samples.len(), 1);
        assert_eq!(
            (curve.samples[0].recall, curve.samples[0].precision),
            (1.0, 1.0)
        );
    }

    #[test]
    fn pr_curve_tp_then_duplicate() {
        let img = image_with_gt("a", &[(10.0, 10.0, 50.0, 50.0)]);
        let d1 = det("a", 0.9, 0.1, 0.1, 0.5, 0.5);
        let d2 = det("a", 0.8, 0.1, 0.1, 0.5, 0.5);
        let m = match_detections(&[d1, d2], &img, 0.5).unwrap();
        let pooled = PooledMatches::pool([m]);
        let curve = pr_curve(&pooled, 1, 1);
        let got: Vec<(f64, f64)> = curve
            .samples
            .iter()
            .map(|s| (s.recall, s.precision))
            .collect();
        assert_eq!(got, vec![(1.0, 1.0), (1.0, 0.5)]);
    }

    #[test]
    fn pr_curve_with_no_positives_is_flagged() {
        let img = image_with_gt("a", &[]);
        let dets: Vec<Detection> = (0..3)
            .map(|i| det("a", 0.9 - 0.1 * i as f64, 0.1, 0.1, 0.3, 0.3))
            .collect();
        let m = match_detections(&dets, &img, 0.5).unwrap();
        let pooled = PooledMatches::pool([m]);
        let curve = pr_curve(&pooled, 1, 0);
        assert!(curve.empty_positives());
        assert_eq!(curve.samples.len(), 3);
        assert_eq!(average_precision(&curve, ApMethod::ContinuousArea), 0.0);
        assert_eq!(average_precision(&curve, ApMethod::ElevenPoint), 0.0);
    }

    #[test]
    fn ap_perfect_detector_is_one_under_both_methods() {
        let curve = PRCurve {
            samples: vec![PrSample {
                rank: 1,
                score: 0.9,
                recall: 1.0,
                precision: 1.0,
            }],
            positives_total: 1,
        };
        assert_eq!(average_precision(&curve, ApMethod::ContinuousArea), 1.0);
        assert_eq!(average_precision(&curve, ApMethod::ElevenPoint), 1.0);
    }

    #[test]
    fn ap_envelope_absorbs_trailing_duplicate() {
        let curve = PRCurve {
            samples: vec![
                PrSample {
                    rank: 1,
                    score: 0.9,
                    recall: 1.0,
                    precision: 1.0,
                },
                PrSample {
                    rank: 2,
                    score: 0.8,
                    recall: 1.0,
                    precision: 0.5,
                },
            ],
            positives_total: 1,
        };
        assert_eq!(average_precision(&curve, ApMethod::ContinuousArea), 1.0);
    }

    #[test]
    fn map_is_unweighted_mean_over_classes_with_gt() {
        assert_eq!(
            mean_average_precision(&[(1, 0.42, 10)]).unwrap(),
            0.42
        );
        assert_eq!(
            mean_average_precision(&[(1, 1.0, 3), (2, 0.0, 7)]).unwrap(),
            0.5
        );
        // zero-GT class excluded from the mean
        assert_eq!(
            mean_average_precision(&[(1, 1.0, 3), (2, 0.25, 0)]).unwrap(),
            1.0
        );
        assert!(matches!(
            mean_average_precision(&[(1, 0.5, 0)]),
            Err(MetricsError::NoEvaluableClass)
        ));
    }

    #[test]
    fn classification_rule_is_strictly_greater() {
        assert!(image_predicted_positive([0.51], 0.5));
        assert!(!image_predicted_positive([0.50], 0.5));
        assert!(!image_predicted_positive(std::iter::empty(), 0.5));
    }

    #[test]
    fn classification_metric_fixtures() {
        // counts solved from the published 52-positive / 48-negative split
        let cases = [
            (ConfusionCounts::new(47, 13, 35, 5), "82.00", "78.33", "90.38"),
            (ConfusionCounts::new(37, 13, 35, 15), "72.00", "74.00", "71.15"),
            (ConfusionCounts::new(25, 23, 25, 27), "50.00", "52.08", "48.07"),
        ];
        for (counts, acc, prec, rec) in cases {
            let m = classification_metrics(&counts);
            assert_eq!(format_percent(m.accuracy.unwrap()), acc);
            assert_eq!(format_percent(m.precision.unwrap()), prec);
            assert_eq!(format_percent(m.recall.unwrap()), rec);
        }
    }

    #[test]
    fn classification_metric_identities_hold() {
        // accuracy*total = tp+tn and recall*(tp+fn) = tp, up to float noise
        let counts = [
            ConfusionCounts::new(47, 13, 35, 5),
            ConfusionCounts::new(1, 0, 0, 0),
            ConfusionCounts::new(3, 7, 11, 13),
            ConfusionCounts::new(0, 9, 2, 4),
        ];
        for c in counts {
            let m = classification_metrics(&c);
            if let Some(acc) = m.accuracy {
                let lhs = acc * c.total() as f64;
                let rhs = (c.true_positives + c.true_negatives) as f64;
                assert!((lhs - rhs).abs() <= 1e-9, "{lhs} vs {rhs}");
            }
            if let Some(recall) = m.recall {
                let lhs = recall * (c.true_positives + c.false_negatives) as f64;
                assert!((lhs - c.true_positives as f64).abs() <= 1e-9);
            }
            if let Some(precision) = m.precision {
                let lhs = precision * (c.true_positives + c.false_positives) as f64;
                assert!((lhs - c.true_positives as f64).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn undefined_ratios_are_none_not_zero() {
        let m = classification_metrics(&ConfusionCounts::new(0, 0, 5, 5));
        assert_eq!(m.precision, None);
        assert!(m.recall.is_some());
        let m = classification_metrics(&ConfusionCounts::new(0, 5, 5, 0));
        assert_eq!(m.recall, None);
        let m = classification_metrics(&ConfusionCounts::default());
        assert_eq!(m.accuracy, None);
    }

    #[test]
    fn detections_json_round_trips_and_validates() {
        let text = r#"{"detections":[
            {"image_id":"a","label_id":1,"score":0.87,"box":[0.1,0.2,0.3,0.4]}
        ]}"#;
        let dets = detections_from_json(text).unwrap();
        assert_eq!(dets.len(), 1);
        assert_eq!(dets[0].bbox.to_wire(), [0.1, 0.2, 0.3, 0.4]);
        let re = detections_from_json(&detections_to_json(&dets)).unwrap();
        assert_eq!(re, dets);

        let bad_score = text.replace("0.87", "1.5");
        assert!(detections_from_json(&bad_score).is_err());
        let bad_box = text.replace("0.3", "-0.3");
        assert!(detections_from_json(&bad_box).is_err());
    }

    #[test]
    fn evaluate_produces_full_report() {
        let manifest = DatasetManifest {
            images: vec![
                image_with_gt("pos", &[(10.0, 10.0, 50.0, 50.0)]),
                image_with_gt("neg", &[]),
            ],
            label_map: LabelMap::algae(),
        };
        let dets = vec![det("pos", 0.9, 0.1, 0.1, 0.5, 0.5)];
        let eval = evaluate(&manifest, &dets, None, &EvalConfig::default()).unwrap();
        assert_eq!(eval.report.map_continuous, 1.0);
        assert_eq!(eval.report.map_eleven_point, 1.0);
        assert_eq!(eval.report.per_class_ap["algae"].continuous, 1.0);
        assert_eq!(eval.report.counts, ConfusionCounts::new(1, 0, 1, 0));
        assert_eq!(eval.report.accuracy, Some(1.0));
    }

    #[test]
    fn evaluate_with_zero_detections_gives_zero_map_and_recall() {
        let manifest = DatasetManifest {
            images: vec![
                image_with_gt("pos", &[(10.0, 10.0, 50.0, 50.0)]),
                image_with_gt("neg", &[]),
            ],
            label_map: LabelMap::algae(),
        };
        let eval = evaluate(&manifest, &[], None, &EvalConfig::default()).unwrap();
        assert_eq!(eval.report.map_continuous, 0.0);
        assert_eq!(eval.report.recall, Some(0.0));
        assert_eq!(eval.report.precision, None);
    }

    #[test]
    fn evaluate_rejects_unknown_image() {
        let manifest = DatasetManifest {
            images: vec![image_with_gt("a", &[])],
            label_map: LabelMap::algae(),
        };
        let dets = vec![det("ghost", 0.9, 0.1, 0.1, 0.5, 0.5)];
        assert!(matches!(
            evaluate(&manifest, &dets, None, &EvalConfig::default()),
            Err(MetricsError::UnknownImage(_))
        ));
    }

    #[test]
    fn percent_formatting_truncates() {
        assert_eq!(format_percent(25.0 / 52.0), "48.07");
        assert_eq!(format_percent(25.0 / 48.0), "52.08");
        assert_eq!(format_percent(0.5), "50.00");
        assert_eq!(format_percent(1.0), "100.00");
        assert_eq!(format_percent(0.0), "0.00");
    }

    #[test]
    fn csv_export_shape() {
        let curve = PRCurve {
            samples: vec![
                PrSample {
                    rank: 1,
                    score: 0.9,
                    recall: 0.5,
                    precision: 1.0,
                },
                PrSample {
                    rank: 2,
                    score: 0.4,
                    recall: 1.0,
                    precision: 1.0,
                },
            ],
            positives_total: 2,
        };
        let csv = curve.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("rank,score,recall,precision"));
        assert_eq!(lines.next(), Some("1,0.9,0.5,1"));
        assert_eq!(lines.next(), Some("2,0.4,1,1"));
    }
}
