//! Shared helpers for the CLI integration tests: process driving and
//! synthetic fixture generation.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use algaeval_core::dataset::{DatasetManifest, GroundTruthBox, ImageEntry, LabelMap};
use algaeval_core::geometry::{BoundingBox, ImageSize};
use algaeval_core::imgio::Image;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn algaeval_bin() -> &'static str {
    env!("CARGO_BIN_EXE_algaeval")
}

pub fn mock_backend_bin() -> &'static str {
    env!("CARGO_BIN_EXE_algaeval-mock-backend")
}

pub struct CliRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_cli(args: &[&str]) -> CliRun {
    let output = Command::new(algaeval_bin())
        .args(args)
        .output()
        .expect("failed to launch algaeval");
    CliRun {
        code: output.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&output.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
    }
}

/// One synthetic scene: gray background with non-touching green rectangles
/// placed on a 4x3 cell grid, each far above the default minimum blob area.
pub fn synthetic_scene(seed: u64, index: usize) -> (Image, ImageEntry) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index as u64);
    let (w, h) = (128u32, 96u32);
    let mut image = Image::filled_rgb(w, h, [90, 90, 110]);
    let mut ground_truth = Vec::new();
    for cell_y in 0..3u32 {
        for cell_x in 0..4u32 {
            if !rng.random_bool(0.6) {
                continue;
            }
            let x0 = cell_x * 32 + rng.random_range(3..6);
            let y0 = cell_y * 32 + rng.random_range(3..6);
            let x1 = (x0 + rng.random_range(14..24)).min(cell_x * 32 + 29);
            let y1 = (y0 + rng.random_range(14..24)).min(cell_y * 32 + 29);
            let green = [20, rng.random_range(180..=255u8), 40];
            for y in y0..=y1 {
                for x in x0..=x1 {
                    image.set_rgb(x, y, green);
                }
            }
            ground_truth.push(GroundTruthBox {
                label_id: 1,
                bbox: BoundingBox::pixel(
                    f64::from(x0),
                    f64::from(y0),
                    f64::from(x1 + 1),
                    f64::from(y1 + 1),
                )
                .unwrap(),
            });
        }
    }
    let id = format!("scene-{index:03}");
    let entry = ImageEntry {
        id: id.clone(),
        path: format!("{id}.ppm"),
        size: ImageSize::new(w, h).unwrap(),
        ground_truth,
    };
    (image, entry)
}

pub struct SyntheticSuite {
    pub manifest_path: PathBuf,
    pub manifest: DatasetManifest,
    pub image_paths: Vec<PathBuf>,
}

/// Write `count` synthetic scenes as PPM files plus their manifest.
pub fn write_synthetic_suite(dir: &Path, count: usize, seed: u64) -> SyntheticSuite {
    let mut images = Vec::new();
    let mut image_paths = Vec::new();
    for index in 0..count {
        let (image, entry) = synthetic_scene(seed, index);
        let path = dir.join(&entry.path);
        std::fs::write(&path, image.encode_ppm().unwrap()).unwrap();
        image_paths.push(path);
        images.push(entry);
    }
    let manifest = DatasetManifest {
        images,
        label_map: LabelMap::algae(),
    };
    let manifest_path = dir.join("manifest.json");
    std::fs::write(&manifest_path, manifest.to_json() + "\n").unwrap();
    SyntheticSuite {
        manifest_path,
        manifest,
        image_paths,
    }
}

/// Tiny 2x2 gray frames for benchmark runs where content does not matter.
pub fn write_blank_frames(dir: &Path, count: usize) -> Vec<PathBuf> {
    let image = Image::filled_rgb(2, 2, [50, 50, 50]);
    let bytes = image.encode_ppm().unwrap();
    (0..count)
        .map(|i| {
            let path = dir.join(format!("frame-{i:04}.ppm"));
            std::fs::write(&path, &bytes).unwrap();
            path
        })
        .collect()
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn read_golden(name: &str) -> String {
    let path = golden_dir().join(name);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read golden {}: {e}", path.display()))
}
