//! Annotated-dataset ingestion, label maps, deterministic train/val/test
//! splits, and photometric augmentation.
//!
//! The manifest lives in a single JSON document (see [`DatasetManifest::from_json`])
//! with pixel-coordinate ground-truth boxes. Manifest values are immutable
//! after load; augmentation is a pure function per image, so both can be used
//! from many threads without shared state.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{hsv_to_rgb, rgb_to_hsv};
use crate::geometry::{BoundingBox, GeometryError, ImageSize};
use crate::imgio::Image;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("manifest parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("label map invalid: {0}")]
    LabelMap(String),
    #[error("duplicate image_id {0:?}")]
    DuplicateImageId(String),
    #[error("image {image_id:?}: {reason}")]
    InvalidImage { image_id: String, reason: String },
    #[error("split ratios must be non-negative and sum to 1 (got {0} + {1} + {2})")]
    RatioSum(f64, f64, f64),
    #[error("augmentation spec invalid: {0}")]
    AugmentationSpec(String),
    #[error("unsupported channel count {0} (augmentation needs 8-bit RGB)")]
    UnsupportedChannels(u8),
}

/// Class name <-> integer id mapping. Ids are unique and >= 1; names are
/// unique and non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    entries: Vec<LabelEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub id: u32,
    pub name: String,
}

impl LabelMap {
    pub fn new(entries: Vec<LabelEntry>) -> Result<Self, DatasetError> {
        if entries.is_empty() {
            return Err(DatasetError::LabelMap("label map is empty".into()));
        }
        let mut ids = HashSet::new();
        let mut names = HashSet::new();
        for e in &entries {
            if e.id == 0 {
                return Err(DatasetError::LabelMap(format!(
                    "id for {:?} must be >= 1",
                    e.name
                )));
            }
            if e.name.is_empty() {
                return Err(DatasetError::LabelMap(format!("id {} has an empty name", e.id)));
            }
            if !ids.insert(e.id) {
                return Err(DatasetError::LabelMap(format!("duplicate id {}", e.id)));
            }
            if !names.insert(e.name.clone()) {
                return Err(DatasetError::LabelMap(format!(
                    "duplicate name {:?}",
                    e.name
                )));
            }
        }
        Ok(Self { entries })
    }

    /// The single-class "algae" map used throughout the toolkit defaults.
    pub fn algae() -> Self {
        Self::new(vec![LabelEntry {
            id: 1,
            name: "algae".into(),
        }])
        .expect("static label map is valid")
    }

    pub fn entries(&self) -> &[LabelEntry] {
        &self.entries
    }

    pub fn contains_id(&self, id: u32) -> bool {
        self.entries.iter().any(|e| e.id == id)
    }

    pub fn name_of(&self, id: u32) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .map(|e| e.name.as_str())
    }

    pub fn id_of(&self, name: &str) -> Option<u32> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.id)
    }

    /// Parse the `id:name` line format. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self, DatasetError> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (id, name) = line.split_once(':').ok_or_else(|| {
                DatasetError::LabelMap(format!("line {}: expected id:name", lineno + 1))
            })?;
            let id: u32 = id.trim().parse().map_err(|_| {
                DatasetError::LabelMap(format!("line {}: bad id {:?}", lineno + 1, id.trim()))
            })?;
            entries.push(LabelEntry {
                id,
                name: name.trim().to_string(),
            });
        }
        Self::new(entries)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("{}:{}\n", e.id, e.name));
        }
        out
    }
}

/// One annotated rectangle: a class id plus its pixel-space box.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthBox {
    pub label_id: u32,
    pub bbox: BoundingBox,
}

/// One image record: identity, location on disk, dimensions, annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageEntry {
    pub id: String,
    pub path: String,
    pub size: ImageSize,
    pub ground_truth: Vec<GroundTruthBox>,
}

/// A validated dataset: images plus the label map their annotations use.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub images: Vec<ImageEntry>,
    pub label_map: LabelMap,
}

// Raw serde mirror of the manifest JSON schema. Unknown top-level keys are
// rejected so schema drift fails loudly.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDoc {
    label_map: Vec<LabelEntry>,
    images: Vec<ImageEntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct ImageEntryDoc {
    id: String,
    path: String,
    width: u32,
    height: u32,
    boxes: Vec<BoxDoc>,
}

#[derive(Serialize, Deserialize)]
struct BoxDoc {
    label_id: u32,
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl DatasetManifest {
    /// Read and validate a manifest file.
    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Parse and validate manifest JSON. Boxes outside their image bounds are
    /// rejected, not clamped; errors name the offending image id.
    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        let doc: ManifestDoc = serde_json::from_str(text)?;
        let label_map = LabelMap::new(doc.label_map)?;

        let mut seen = HashSet::new();
        let mut images = Vec::with_capacity(doc.images.len());
        for img in doc.images {
            if !seen.insert(img.id.clone()) {
                return Err(DatasetError::DuplicateImageId(img.id));
            }
            let bad = |reason: String| DatasetError::InvalidImage {
                image_id: img.id.clone(),
                reason,
            };
            let size = ImageSize::new(img.width, img.height)
                .map_err(|e: GeometryError| bad(e.to_string()))?;
            let mut ground_truth = Vec::with_capacity(img.boxes.len());
            for b in &img.boxes {
                if !label_map.contains_id(b.label_id) {
                    return Err(bad(format!("label_id {} not in label map", b.label_id)));
                }
                let bbox = BoundingBox::pixel(b.x_min, b.y_min, b.x_max, b.y_max)
                    .map_err(|e| bad(e.to_string()))?;
                if !bbox.fits_within(size) {
                    return Err(bad(format!(
                        "box [{}, {}, {}, {}] outside image bounds {}x{}",
                        b.x_min, b.y_min, b.x_max, b.y_max, img.width, img.height
                    )));
                }
                ground_truth.push(GroundTruthBox {
                    label_id: b.label_id,
                    bbox,
                });
            }
            images.push(ImageEntry {
                id: img.id,
                path: img.path,
                size,
                ground_truth,
            });
        }
        Ok(Self { images, label_map })
    }

    /// Canonical pretty-printed JSON. `from_json(to_json(m))` equals `m`.
    pub fn to_json(&self) -> String {
        let doc = ManifestDoc {
            label_map: self.label_map.entries.clone(),
            images: self
                .images
                .iter()
                .map(|img| ImageEntryDoc {
                    id: img.id.clone(),
                    path: img.path.clone(),
                    width: img.size.width(),
                    height: img.size.height(),
                    boxes: img
                        .ground_truth
                        .iter()
                        .map(|gt| BoxDoc {
                            label_id: gt.label_id,
                            x_min: gt.bbox.x_min(),
                            y_min: gt.bbox.y_min(),
                            x_max: gt.bbox.x_max(),
                            y_max: gt.bbox.y_max(),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("manifest serialization cannot fail")
    }

    pub fn image(&self, id: &str) -> Option<&ImageEntry> {
        self.images.iter().find(|img| img.id == id)
    }
}

/// Which of the three subsets an image belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SplitKind {
    #[serde(rename = "train")]
    Training,
    #[serde(rename = "val")]
    Validation,
    #[serde(rename = "test")]
    Test,
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitKind::Training => "train",
            SplitKind::Validation => "val",
            SplitKind::Test => "test",
        })
    }
}

impl std::str::FromStr for SplitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(SplitKind::Training),
            "val" => Ok(SplitKind::Validation),
            "test" => Ok(SplitKind::Test),
            other => Err(format!("unknown split {other:?} (train|val|test)")),
        }
    }
}

/// Assignment of every manifest image to exactly one subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub seed: u64,
    pub assignments: BTreeMap<String, SplitKind>,
}

impl SplitAssignment {
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for kind in self.assignments.values() {
            match kind {
                SplitKind::Training => c.0 += 1,
                SplitKind::Validation => c.1 += 1,
                SplitKind::Test => c.2 += 1,
            }
        }
        c
    }

    pub fn subset(&self, kind: SplitKind) -> impl Iterator<Item = &str> {
        self.assignments
            .iter()
            .filter(move |(_, k)| **k == kind)
            .map(|(id, _)| id.as_str())
    }

    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("split serialization cannot fail")
    }
}

/// Train/validation/test proportions. Non-negative, summing to 1 within 1e-9.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self, DatasetError> {
        let ok = train >= 0.0
            && val >= 0.0
            && test >= 0.0
            && (train + val + test - 1.0).abs() <= 1e-9;
        if !ok {
            return Err(DatasetError::RatioSum(train, val, test));
        }
        Ok(Self { train, val, test })
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.7,
            val: 0.2,
            test: 0.1,
        }
    }
}

impl std::str::FromStr for SplitRatios {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err("expected three comma-separated ratios, e.g. 0.7,0.2,0.1".into());
        }
        let mut vals = [0.0f64; 3];
        for (v, p) in vals.iter_mut().zip(&parts) {
            *v = p
                .trim()
                .parse()
                .map_err(|_| format!("bad ratio {:?}", p.trim()))?;
        }
        SplitRatios::new(vals[0], vals[1], vals[2]).map_err(|e| e.to_string())
    }
}

/// Apportion `total` items over the ratios by largest remainder; ties go to
/// the earlier subset in (train, val, test) order. Remainders within 1e-9
/// count as tied, so float jitter cannot override the order rule (0.7/0.2/0.1
/// over 2 items leaves exact remainders 0.4 and 0.4; train wins).
pub fn largest_remainder_counts(total: usize, ratios: SplitRatios) -> (usize, usize, usize) {
    let quotas = [
        ratios.train * total as f64,
        ratios.val * total as f64,
        ratios.test * total as f64,
    ];
    let mut counts = [0usize; 3];
    let mut fractions = [0.0f64; 3];
    let mut assigned = 0usize;
    for i in 0..3 {
        counts[i] = quotas[i].floor() as usize;
        fractions[i] = quotas[i] - quotas[i].floor();
        assigned += counts[i];
    }
    let mut taken = [false; 3];
    for _ in 0..total.saturating_sub(assigned) {
        let mut winner = None;
        for i in 0..3 {
            if taken[i] {
                continue;
            }
            winner = match winner {
                None => Some(i),
                Some(best) if fractions[i] > fractions[best] + 1e-9 => Some(i),
                keep => keep,
            };
        }
        let winner = winner.expect("remainder seats never exceed the subsets");
        taken[winner] = true;
        counts[winner] += 1;
    }
    (counts[0], counts[1], counts[2])
}

/// Deterministically assign every manifest image to a subset.
///
/// Image ids are sorted lexicographically before the seeded shuffle, so the
/// outcome does not depend on manifest file ordering. Counts follow
/// [`largest_remainder_counts`].
pub fn split(
    manifest: &DatasetManifest,
    ratios: SplitRatios,
    seed: u64,
) -> SplitAssignment {
    let mut ids: Vec<&str> = manifest.images.iter().map(|img| img.id.as_str()).collect();
    ids.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);

    let (n_train, n_val, _) = largest_remainder_counts(ids.len(), ratios);
    let mut assignments = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let kind = if i < n_train {
            SplitKind::Training
        } else if i < n_train + n_val {
            SplitKind::Validation
        } else {
            SplitKind::Test
        };
        assignments.insert((*id).to_string(), kind);
    }
    SplitAssignment { seed, assignments }
}

/// Photometric augmentation parameters. Each field is a closed sampling
/// range; one value per transform is drawn per image from the seeded RNG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationSpec {
    /// Additive brightness on the 0-255 scale.
    pub brightness_delta: (f64, f64),
    /// Multiplicative contrast about the fixed midpoint 128.
    pub contrast_factor: (f64, f64),
    /// Multiplicative saturation in HSV space.
    pub saturation_factor: (f64, f64),
    /// Additive hue rotation in degrees, wrapping around 360.
    pub hue_shift_degrees: (f64, f64),
    pub seed: u64,
}

impl AugmentationSpec {
    /// A spec whose transforms all leave the image unchanged.
    pub fn identity(seed: u64) -> Self {
        Self {
            brightness_delta: (0.0, 0.0),
            contrast_factor: (1.0, 1.0),
            saturation_factor: (1.0, 1.0),
            hue_shift_degrees: (0.0, 0.0),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let ordered = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 <= r.1;
        if !ordered(self.brightness_delta)
            || !ordered(self.contrast_factor)
            || !ordered(self.saturation_factor)
            || !ordered(self.hue_shift_degrees)
        {
            return Err(DatasetError::AugmentationSpec(
                "each range must be finite with low <= high".into(),
            ));
        }
        if self.contrast_factor.0 <= 0.0 || self.saturation_factor.0 <= 0.0 {
            return Err(DatasetError::AugmentationSpec(
                "contrast and saturation ranges must be strictly positive".into(),
            ));
        }
        if self.hue_shift_degrees.0 < -180.0 || self.hue_shift_degrees.1 > 180.0 {
            return Err(DatasetError::AugmentationSpec(
                "hue shift must lie in [-180, 180]".into(),
            ));
        }
        Ok(())
    }
}

fn sample(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    rng.random_range(range.0..=range.1)
}

/// Apply brightness -> contrast -> saturation -> hue, in that order, with one
/// parameter drawn per transform from the spec's seed. Output dimensions are
/// unchanged and channels are clamped to [0, 255]. Transforms whose drawn
/// parameter is the identity are skipped, so an identity spec returns a
/// byte-for-byte copy.
pub fn augment(image: &Image, spec: &AugmentationSpec) -> Result<Image, DatasetError> {
    if image.channels() != 3 {
        return Err(DatasetError::UnsupportedChannels(image.channels()));
    }
    spec.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let brightness = sample(&mut rng, spec.brightness_delta);
    let contrast = sample(&mut rng, spec.contrast_factor);
    let saturation = sample(&mut rng, spec.saturation_factor);
    let hue_shift = sample(&mut rng, spec.hue_shift_degrees);

    let mut data = Vec::with_capacity(image.data().len());
    for px in image.data().chunks_exact(3) {
        let mut rgb = [f64::from(px[0]), f64::from(px[1]), f64::from(px[2])];
        if brightness != 0.0 {
            for v in &mut rgb {
                *v = (*v + brightness).clamp(0.0, 255.0);
            }
        }
        if contrast != 1.0 {
            for v in &mut rgb {
                *v = ((*v - 128.0) * contrast + 128.0).clamp(0.0, 255.0);
            }
        }
        if saturation != 1.0 || hue_shift != 0.0 {
            let (h, s, v) = rgb_to_hsv(rgb[0] / 255.0, rgb[1] / 255.0, rgb[2] / 255.0);
            let s = (s * saturation).clamp(0.0, 1.0);
            let h = (h + hue_shift).rem_euclid(360.0);
            let (r, g, b) = hsv_to_rgb(h, s, v);
            rgb = [r * 255.0, g * 255.0, b * 255.0];
        }
        for v in rgb {
            data.push(v.clamp(0.0, 255.0).round() as u8);
        }
    }
    Ok(Image::from_raw(image.width(), image.height(), 3, data)
        .expect("augmented buffer has the input dimensions"))
}
