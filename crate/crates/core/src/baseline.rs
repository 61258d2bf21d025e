//! Color-heuristic baseline detector: green/greenish-blue HSV segmentation,
//! 4-connected component labeling, and scored bounding boxes.
//!
//! This detector exists so the full evaluation pipeline can run end-to-end
//! with no external model. It contains no randomness: identical inputs give
//! identical output, and everything here is a pure per-image computation.

use thiserror::Error;

use crate::color::rgb_to_hsv;
use crate::geometry::BoundingBox;
use crate::imgio::Image;
use crate::runtime::DetectionBatch;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("unsupported channel count {0} (segmentation needs 8-bit RGB)")]
    UnsupportedChannels(u8),
    #[error("invalid color thresholds: {0}")]
    InvalidThresholds(String),
    #[error("min_area_fraction {0} out of range [0, 1)")]
    InvalidMinAreaFraction(f64),
}

/// HSV acceptance window. The hue interval may wrap around 0/360 (a range of
/// [350, 10] accepts hues >= 350 or <= 10).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorThresholds {
    pub hue_low: f64,
    pub hue_high: f64,
    pub saturation_min: f64,
    pub value_min: f64,
}

impl Default for ColorThresholds {
    /// Spans green through greenish-blue. These are toolkit defaults chosen
    /// for the synthetic fixtures, not measured properties of real algae.
    fn default() -> Self {
        Self {
            hue_low: 70.0,
            hue_high: 170.0,
            saturation_min: 0.25,
            value_min: 0.15,
        }
    }
}

impl ColorThresholds {
    pub fn validate(&self) -> Result<(), BaselineError> {
        let hue_ok = |h: f64| (0.0..360.0).contains(&h);
        if !hue_ok(self.hue_low) || !hue_ok(self.hue_high) {
            return Err(BaselineError::InvalidThresholds(format!(
                "hue bounds [{}, {}] must lie in [0, 360)",
                self.hue_low, self.hue_high
            )));
        }
        for (name, v) in [
            ("saturation_min", self.saturation_min),
            ("value_min", self.value_min),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(BaselineError::InvalidThresholds(format!(
                    "{name} {v} must lie in [0, 1]"
                )));
            }
        }
        Ok(())
    }

    fn accepts(&self, h: f64, s: f64, v: f64) -> bool {
        let hue_in = if self.hue_low <= self.hue_high {
            (self.hue_low..=self.hue_high).contains(&h)
        } else {
            h >= self.hue_low || h <= self.hue_high
        };
        hue_in && s >= self.saturation_min && v >= self.value_min
    }
}

/// Row-major binary mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

/// Mark every pixel whose HSV value falls inside the thresholds.
pub fn segment(image: &Image, thresholds: &ColorThresholds) -> Result<Mask, BaselineError> {
    if image.channels() != 3 {
        return Err(BaselineError::UnsupportedChannels(image.channels()));
    }
    thresholds.validate()?;
    let mut mask = Mask::new(image.width(), image.height());
    for (i, px) in image.data().chunks_exact(3).enumerate() {
        let (h, s, v) = rgb_to_hsv(
            f64::from(px[0]) / 255.0,
            f64::from(px[1]) / 255.0,
            f64::from(px[2]) / 255.0,
        );
        mask.bits[i] = thresholds.accepts(h, s, v);
    }
    Ok(mask)
}

/// A connected foreground region.
#[derive(Debug, Clone, PartialEq)]
pub struct Blob {
    pub pixel_count: usize,
    /// Pixel-space box covering the full extent of member pixels (so a blob
    /// spanning columns 10..=49 has x_min 10, x_max 50).
    pub bbox: BoundingBox,
    /// In-range pixels divided by box area, in (0, 1].
    pub density: f64,
}

// union-find with path halving
fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let ra = find(parent, a);
    let rb = find(parent, b);
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// Label 4-connected components with two-pass union-find, discard components
/// smaller than `min_area_fraction` of the image area, and return the rest
/// ordered by descending pixel count (ties by top-left corner).
pub fn connected_components(
    mask: &Mask,
    min_area_fraction: f64,
) -> Result<Vec<Blob>, BaselineError> {
    if !(0.0..1.0).contains(&min_area_fraction) {
        return Err(BaselineError::InvalidMinAreaFraction(min_area_fraction));
    }
    let w = mask.width as usize;
    let h = mask.height as usize;
    let mut labels = vec![usize::MAX; w * h];
    let mut parent: Vec<usize> = Vec::new();

    for y in 0..h {
        for x in 0..w {
            let idx = y * w + x;
            if !mask.bits[idx] {
                continue;
            }
            let west = (x > 0 && mask.bits[idx - 1]).then(|| labels[idx - 1]);
            let north = (y > 0 && mask.bits[idx - w]).then(|| labels[idx - w]);
            match (west, north) {
                (None, None) => {
                    labels[idx] = parent.len();
                    parent.push(parent.len());
                }
                (Some(a), None) | (None, Some(a)) => labels[idx] = a,
                (Some(a), Some(b)) => {
                    labels[idx] = a.min(b);
                    union(&mut parent, a, b);
                }
            }
        }
    }

    #[derive(Clone)]
    struct Extent {
        count: usize,
        min_x: usize,
        min_y: usize,
        max_x: usize,
        max_y: usize,
    }
    let mut extents: Vec<Option<Extent>> = vec![None; parent.len()];
    for y in 0..h {
        for x in 0..w {
            let idx = y * w + x;
            if !mask.bits[idx] {
                continue;
            }
            let root = find(&mut parent, labels[idx]);
            let e = extents[root].get_or_insert(Extent {
                count: 0,
                min_x: x,
                min_y: y,
                max_x: x,
                max_y: y,
            });
            e.count += 1;
            e.min_x = e.min_x.min(x);
            e.min_y = e.min_y.min(y);
            e.max_x = e.max_x.max(x);
            e.max_y = e.max_y.max(y);
        }
    }

    let min_pixels = min_area_fraction * (w * h) as f64;
    let mut blobs: Vec<Blob> = extents
        .into_iter()
        .flatten()
        .filter(|e| e.count as f64 >= min_pixels)
        .map(|e| {
            let bbox = BoundingBox::pixel(
                e.min_x as f64,
                e.min_y as f64,
                (e.max_x + 1) as f64,
                (e.max_y + 1) as f64,
            )
            .expect("blob extents are ordered and non-negative");
            let density = e.count as f64 / bbox.area();
            Blob {
                pixel_count: e.count,
                bbox,
                density,
            }
        })
        .collect();
    blobs.sort_by(|a, b| {
        b.pixel_count
            .cmp(&a.pixel_count)
            .then_with(|| a.bbox.y_min().partial_cmp(&b.bbox.y_min()).unwrap())
            .then_with(|| a.bbox.x_min().partial_cmp(&b.bbox.x_min()).unwrap())
    });
    Ok(blobs)
}

/// Full baseline pass: segment, label components, and emit one detection per
/// surviving blob with the blob's density as its confidence score and
/// label id 1.
pub fn detect(
    image: &Image,
    thresholds: &ColorThresholds,
    min_area_fraction: f64,
    image_id: &str,
) -> Result<DetectionBatch, BaselineError> {
    let mask = segment(image, thresholds)?;
    let blobs = connected_components(&mask, min_area_fraction)?;
    let size = image.size();
    let mut batch = DetectionBatch::empty(image_id);
    for blob in &blobs {
        let normalized = blob
            .bbox
            .normalize(size)
            .expect("blob boxes fit inside their image");
        batch.boxes.push(normalized.to_wire());
        batch.scores.push(blob.density);
        batch.classes.push(1);
    }
    batch.num_detections = blobs.len();
    Ok(batch)
}
