//! The built-in baseline behind the backend interface: frame runs against
//! real files, with contents cross-checked against direct detector calls,
//! plus randomized bounds checks for coordinate conversion.

use std::path::PathBuf;

use algaeval_core::baseline::{detect, ColorThresholds};
use algaeval_core::geometry::{BoundingBox, ImageSize, ScaleMode};
use algaeval_core::imgio::Image;
use algaeval_core::runtime::{
    run_backend, threshold_and_convert, BuiltinBaselineBackend, DetectionBatch, FrameRequest,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn green_rect_scene(rects: &[(u32, u32, u32, u32)]) -> Image {
    let mut image = Image::filled_rgb(80, 60, [100, 100, 100]);
    for &(x0, y0, x1, y1) in rects {
        for y in y0..=y1 {
            for x in x0..=x1 {
                image.set_rgb(x, y, [0, 220, 30]);
            }
        }
    }
    image
}

#[test]
fn builtin_backend_over_fixture_files_matches_direct_detection() {
    let dir = tempfile::tempdir().unwrap();
    let scenes = [
        green_rect_scene(&[(10, 10, 30, 25)]),
        green_rect_scene(&[]),
        green_rect_scene(&[(5, 5, 20, 20), (50, 35, 75, 55)]),
    ];
    let mut frames = Vec::new();
    for (i, scene) in scenes.iter().enumerate() {
        let path = dir.path().join(format!("scene-{i}.ppm"));
        std::fs::write(&path, scene.encode_ppm().unwrap()).unwrap();
        frames.push(FrameRequest::new(&path, format!("scene-{i}")));
    }

    let mut backend = BuiltinBaselineBackend::default();
    let outcome = run_backend(&mut backend, &frames, 1);
    assert!(outcome.abort.is_none());
    assert_eq!(outcome.frames.len(), 3);

    let expected: Vec<DetectionBatch> = scenes
        .iter()
        .enumerate()
        .map(|(i, scene)| {
            detect(scene, &ColorThresholds::default(), 0.001, &format!("scene-{i}")).unwrap()
        })
        .collect();
    for (frame, want) in outcome.frames.iter().zip(&expected) {
        assert_eq!(frame.outcome.as_ref().unwrap(), want);
    }
    assert_eq!(expected[0].num_detections, 1);
    assert_eq!(expected[1].num_detections, 0);
    assert_eq!(expected[2].num_detections, 2);
}

#[test]
fn unreadable_frame_is_a_per_frame_error_and_the_run_continues() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.ppm");
    std::fs::write(&good, green_rect_scene(&[]).encode_ppm().unwrap()).unwrap();
    let junk = dir.path().join("junk.ppm");
    std::fs::write(&junk, b"not an image").unwrap();

    let frames = [
        FrameRequest::new(&junk, "junk"),
        FrameRequest::new(&good, "good"),
        FrameRequest::new(&PathBuf::from("/no/such/file.ppm"), "ghost"),
    ];
    let mut backend = BuiltinBaselineBackend::default();
    let outcome = run_backend(&mut backend, &frames, 1);
    assert!(outcome.abort.is_none());
    assert_eq!(outcome.frames.len(), 3);
    assert!(outcome.frames[0].outcome.is_err());
    assert!(outcome.frames[1].outcome.is_ok());
    assert!(outcome.frames[2].outcome.is_err());
    assert_eq!(outcome.failed_frames(), 2);
}

#[test]
fn threshold_and_convert_never_leaves_the_image() {
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    for _ in 0..1000 {
        let n = rng.random_range(0..6usize);
        let mut batch = DetectionBatch::empty("r");
        for _ in 0..n {
            let y0: f64 = rng.random_range(0.0..1.0);
            let x0: f64 = rng.random_range(0.0..1.0);
            let y1: f64 = rng.random_range(y0..=1.0);
            let x1: f64 = rng.random_range(x0..=1.0);
            batch.boxes.push([y0, x0, y1, x1]);
            batch.scores.push(rng.random_range(0.0..=1.0));
            batch.classes.push(1);
        }
        batch.num_detections = n;
        let size = ImageSize::new(rng.random_range(1..2000), rng.random_range(1..2000)).unwrap();
        let mode = if rng.random_bool(0.5) {
            ScaleMode::PerAxis
        } else {
            ScaleMode::WidthAll
        };
        let threshold: f64 = rng.random_range(0.0..=1.0);
        for scored in threshold_and_convert(&batch, size, threshold, mode).unwrap() {
            assert!(
                scored.bbox.fits_within(size),
                "{:?} escapes {}x{}",
                scored.bbox,
                size.width(),
                size.height()
            );
            assert!(scored.score > threshold);
        }
    }
    // a wire box is exercised through the same path with degenerate sizes
    let batch = DetectionBatch {
        image_id: "edge".into(),
        boxes: vec![[0.0, 0.0, 1.0, 1.0]],
        scores: vec![1.0],
        classes: vec![1],
        num_detections: 1,
    };
    let size = ImageSize::new(1, 1).unwrap();
    let out = threshold_and_convert(&batch, size, 0.5, ScaleMode::WidthAll).unwrap();
    assert_eq!(out[0].bbox, BoundingBox::pixel(0.0, 0.0, 1.0, 1.0).unwrap());
}
