//! Axis-aligned bounding boxes, coordinate-space conversion, and overlap
//! computation.
//!
//! Boxes are canonically ordered `(x_min, y_min, x_max, y_max)` and tagged
//! with the coordinate space they live in. The detector wire format uses
//! `[y_min, x_min, y_max, x_max]` arrays instead; conversion happens at the
//! boundary via [`BoundingBox::to_wire`] / [`BoundingBox::from_wire_normalized`].
//!
//! All operations here are pure functions on immutable values and are safe to
//! call from any number of threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coordinate-space mismatch: {0:?} vs {1:?}")]
    SpaceMismatch(CoordSpace, CoordSpace),
    #[error("expected a {expected:?}-space box, got {actual:?}")]
    WrongSpace { expected: CoordSpace, actual: CoordSpace },
    #[error("invalid box [{x_min}, {y_min}, {x_max}, {y_max}]: {reason}")]
    InvalidBox {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
        reason: String,
    },
    #[error("invalid image size {width}x{height}: both dimensions must be >= 1")]
    InvalidImageSize { width: u32, height: u32 },
}

/// Coordinate space a box lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordSpace {
    /// Unit square, origin at the top-left corner of the image.
    Normalized,
    /// Image coordinates in `[0, width] x [0, height]`.
    Pixel,
}

/// Image dimensions in pixels. Both dimensions are at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageSize {
    width: u32,
    height: u32,
}

impl ImageSize {
    pub fn new(width: u32, height: u32) -> Result<Self, GeometryError> {
        if width == 0 || height == 0 {
            return Err(GeometryError::InvalidImageSize { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width_f(&self) -> f64 {
        f64::from(self.width)
    }

    pub fn height_f(&self) -> f64 {
        f64::from(self.height)
    }

    /// Total pixel count.
    pub fn area(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }
}

/// How normalized coordinates are scaled to pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleMode {
    /// x coordinates scale by image width, y coordinates by image height.
    #[default]
    PerAxis,
    /// All four coordinates scale by image width. On non-square images the
    /// y values can land outside the image and are clamped afterwards; the
    /// `clamped` flag on [`Denormalized`] reports when that happened.
    WidthAll,
}

/// Result of [`BoundingBox::denormalize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Denormalized {
    pub bbox: BoundingBox,
    /// True when the scaled box had to be clipped back into the image.
    pub clamped: bool,
}

/// Result of [`BoundingBox::clamp_to`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub bbox: BoundingBox,
    /// True when any coordinate was moved.
    pub clamped: bool,
    /// True when clipping collapsed the box to zero area.
    pub degenerate: bool,
}

/// An axis-aligned rectangle with `x_min <= x_max` and `y_min <= y_max`.
///
/// Normalized boxes additionally satisfy coordinates in `[0, 1]`; pixel
/// boxes satisfy coordinates `>= 0` (the upper bound belongs to the owning
/// image and is checked where that image is known, see
/// [`BoundingBox::fits_within`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
    space: CoordSpace,
}

impl BoundingBox {
    fn validate_common(
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    ) -> Result<(), String> {
        for v in [x_min, y_min, x_max, y_max] {
            if !v.is_finite() {
                return Err("coordinates must be finite".into());
            }
        }
        if x_min > x_max || y_min > y_max {
            return Err("min corner must not exceed max corner".into());
        }
        Ok(())
    }

    /// A box in the unit square. Errors unless `0 <= min <= max <= 1` on both axes.
    pub fn normalized(
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    ) -> Result<Self, GeometryError> {
        let invalid = |reason: String| GeometryError::InvalidBox {
            x_min,
            y_min,
            x_max,
            y_max,
            reason,
        };
        Self::validate_common(x_min, y_min, x_max, y_max).map_err(invalid)?;
        if [x_min, y_min, x_max, y_max]
            .iter()
            .any(|v| !(0.0..=1.0).contains(v))
        {
            return Err(invalid(
                "normalized coordinates must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
            space: CoordSpace::Normalized,
        })
    }

    /// A box in pixel coordinates. Errors on negative or unordered
    /// coordinates; the image upper bound is checked by [`Self::fits_within`].
    pub fn pixel(
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    ) -> Result<Self, GeometryError> {
        let invalid = |reason: String| GeometryError::InvalidBox {
            x_min,
            y_min,
            x_max,
            y_max,
            reason,
        };
        Self::validate_common(x_min, y_min, x_max, y_max).map_err(invalid)?;
        if [x_min, y_min, x_max, y_max].iter().any(|v| *v < 0.0) {
            return Err(invalid("pixel coordinates must be non-negative".into()));
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
            space: CoordSpace::Pixel,
        })
    }

    /// Parse a normalized box from the `[y_min, x_min, y_max, x_max]` wire order.
    pub fn from_wire_normalized(wire: [f64; 4]) -> Result<Self, GeometryError> {
        let [y_min, x_min, y_max, x_max] = wire;
        Self::normalized(x_min, y_min, x_max, y_max)
    }

    /// Emit the `[y_min, x_min, y_max, x_max]` wire order.
    pub fn to_wire(&self) -> [f64; 4] {
        [self.y_min, self.x_min, self.y_max, self.x_max]
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn space(&self) -> CoordSpace {
        self.space
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    /// Continuous area (no pixel-inclusive +1 correction).
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn is_degenerate(&self) -> bool {
        self.area() == 0.0
    }

    /// True when the box lies inside `[0, width] x [0, height]`.
    pub fn fits_within(&self, size: ImageSize) -> bool {
        self.x_min >= 0.0
            && self.y_min >= 0.0
            && self.x_max <= size.width_f()
            && self.y_max <= size.height_f()
    }

    /// Intersection-over-union of two boxes in the same coordinate space.
    ///
    /// Degenerate boxes have IoU 0 against everything, including themselves.
    pub fn iou(&self, other: &BoundingBox) -> Result<f64, GeometryError> {
        if self.space != other.space {
            return Err(GeometryError::SpaceMismatch(self.space, other.space));
        }
        let ix = (self.x_max.min(other.x_max) - self.x_min.max(other.x_min)).max(0.0);
        let iy = (self.y_max.min(other.y_max) - self.y_min.max(other.y_min)).max(0.0);
        let intersection = ix * iy;
        let union = self.area() + other.area() - intersection;
        if union <= 0.0 {
            return Ok(0.0);
        }
        // rounding in the area products can overshoot 1 by an ulp
        Ok((intersection / union).clamp(0.0, 1.0))
    }

    /// Scale a normalized box to pixel coordinates.
    ///
    /// [`ScaleMode::PerAxis`] never clamps; [`ScaleMode::WidthAll`] applies
    /// image width to all four coordinates and clips the result back into
    /// the image.
    pub fn denormalize(
        &self,
        size: ImageSize,
        mode: ScaleMode,
    ) -> Result<Denormalized, GeometryError> {
        if self.space != CoordSpace::Normalized {
            return Err(GeometryError::WrongSpace {
                expected: CoordSpace::Normalized,
                actual: self.space,
            });
        }
        let (sx, sy) = match mode {
            ScaleMode::PerAxis => (size.width_f(), size.height_f()),
            ScaleMode::WidthAll => (size.width_f(), size.width_f()),
        };
        let raw = BoundingBox {
            x_min: self.x_min * sx,
            y_min: self.y_min * sy,
            x_max: self.x_max * sx,
            y_max: self.y_max * sy,
            space: CoordSpace::Pixel,
        };
        let clipped = raw.clamp_to(size)?;
        Ok(Denormalized {
            bbox: clipped.bbox,
            clamped: clipped.clamped,
        })
    }

    /// Scale a pixel box that fits within `size` back to the unit square.
    pub fn normalize(&self, size: ImageSize) -> Result<BoundingBox, GeometryError> {
        if self.space != CoordSpace::Pixel {
            return Err(GeometryError::WrongSpace {
                expected: CoordSpace::Pixel,
                actual: self.space,
            });
        }
        BoundingBox::normalized(
            self.x_min / size.width_f(),
            self.y_min / size.height_f(),
            self.x_max / size.width_f(),
            self.y_max / size.height_f(),
        )
    }

    /// Clip a pixel box into `[0, width] x [0, height]`. Idempotent; zero-area
    /// results are permitted and flagged.
    pub fn clamp_to(&self, size: ImageSize) -> Result<Clamped, GeometryError> {
        if self.space != CoordSpace::Pixel {
            return Err(GeometryError::WrongSpace {
                expected: CoordSpace::Pixel,
                actual: self.space,
            });
        }
        let clip_x = |v: f64| v.clamp(0.0, size.width_f());
        let clip_y = |v: f64| v.clamp(0.0, size.height_f());
        let bbox = BoundingBox {
            x_min: clip_x(self.x_min),
            y_min: clip_y(self.y_min),
            x_max: clip_x(self.x_max),
            y_max: clip_y(self.y_max),
            space: CoordSpace::Pixel,
        };
        Ok(Clamped {
            clamped: bbox != *self,
            degenerate: bbox.is_degenerate(),
            bbox,
        })
    }
}
