//! Evaluation, benchmarking, and baseline inference for algae detection
//! systems.
//!
//! The crate is organized around the pipeline it serves:
//!
//! - [`geometry`] — bounding boxes, IoU, and coordinate conversion
//! - [`imgio`] — 8-bit images with PPM (P6) and PNG codecs
//! - [`dataset`] — annotated manifests, label maps, splits, augmentation
//! - [`metrics`] — detection matching, PR curves, AP/mAP, classification
//! - [`baseline`] — the self-contained color-heuristic detector
//! - [`runtime`] — detector backends, frame runs, and FPS benchmarking

pub mod baseline;
pub mod color;
pub mod dataset;
pub mod geometry;
pub mod imgio;
pub mod metrics;
pub mod runtime;

pub use baseline::ColorThresholds;
pub use dataset::{AugmentationSpec, DatasetManifest, LabelMap, SplitAssignment, SplitRatios};
pub use geometry::{BoundingBox, CoordSpace, ImageSize, ScaleMode};
pub use imgio::Image;
pub use metrics::{ApMethod, Detection, EvalConfig, EvalReport};
pub use runtime::{BenchmarkReport, DetectionBatch, DetectorBackend, FrameRequest};
