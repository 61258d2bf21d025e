//! Regenerates the golden fixtures under tests/golden/. Run explicitly after
//! an intentional format change, then review the diff:
//!
//! ```text
//! cargo test -p algaeval-cli --test golden_gen -- --ignored
//! ```

mod common;

use std::collections::HashSet;

use algaeval_core::dataset::{
    self, DatasetManifest, GroundTruthBox, ImageEntry, LabelMap, SplitRatios,
};
use algaeval_core::geometry::{BoundingBox, ImageSize};
use algaeval_core::metrics::{detections_to_json, evaluate, Detection, EvalConfig};
use algaeval_core::runtime::BenchmarkReport;

fn golden_manifest() -> DatasetManifest {
    DatasetManifest {
        images: vec![
            ImageEntry {
                id: "pond-001".into(),
                path: "pond-001.ppm".into(),
                size: ImageSize::new(640, 480).unwrap(),
                ground_truth: vec![
                    GroundTruthBox {
                        label_id: 1,
                        bbox: BoundingBox::pixel(64.0, 48.0, 320.0, 240.0).unwrap(),
                    },
                    GroundTruthBox {
                        label_id: 1,
                        bbox: BoundingBox::pixel(400.0, 300.0, 560.0, 420.0).unwrap(),
                    },
                ],
            },
            ImageEntry {
                id: "pond-002".into(),
                path: "pond-002.ppm".into(),
                size: ImageSize::new(320, 240).unwrap(),
                ground_truth: vec![],
            },
        ],
        label_map: LabelMap::algae(),
    }
}

fn golden_detections() -> Vec<Detection> {
    vec![
        // matches the first pond-001 box exactly
        Detection::new(
            "pond-001",
            1,
            0.95,
            BoundingBox::normalized(0.1, 0.1, 0.5, 0.5).unwrap(),
        )
        .unwrap(),
        // duplicate of the same box at lower confidence
        Detection::new(
            "pond-001",
            1,
            0.6,
            BoundingBox::normalized(0.1, 0.1, 0.5, 0.5).unwrap(),
        )
        .unwrap(),
        // a false positive on the empty image
        Detection::new(
            "pond-002",
            1,
            0.7,
            BoundingBox::normalized(0.2, 0.2, 0.4, 0.4).unwrap(),
        )
        .unwrap(),
    ]
}

#[test]
#[ignore = "writes tests/golden/; run on intentional format changes"]
fn regenerate_goldens() {
    let dir = common::golden_dir();
    std::fs::create_dir_all(&dir).unwrap();

    let manifest = golden_manifest();
    std::fs::write(dir.join("manifest.json"), manifest.to_json() + "\n").unwrap();

    let detections = golden_detections();
    std::fs::write(
        dir.join("detections.json"),
        detections_to_json(&detections) + "\n",
    )
    .unwrap();

    let assignment = dataset::split(&manifest, SplitRatios::new(0.5, 0.0, 0.5).unwrap(), 42);
    std::fs::write(dir.join("split.json"), assignment.to_json() + "\n").unwrap();

    let eval = evaluate(&manifest, &detections, None, &EvalConfig::default()).unwrap();
    std::fs::write(dir.join("report.json"), eval.report.to_json() + "\n").unwrap();

    // a frozen benchmark report; the timing numbers are fixtures, not a run
    let report = BenchmarkReport {
        frames_total: 110,
        frames_warmup: 10,
        frame_errors: 0,
        max_in_flight: 1,
        wall_time_secs: 5.0,
        fps: 20.0,
        latency_p50_ms: 50.0,
        latency_p95_ms: 51.25,
        latencies_ms: vec![50.0, 49.5, 51.25],
    };
    std::fs::write(dir.join("benchmark.json"), report.to_json() + "\n").unwrap();

    // evaluate an excluded-image filter so the fixture set stays coherent
    let only_first: HashSet<String> = ["pond-001".to_string()].into_iter().collect();
    evaluate(&manifest, &detections[..2], Some(&only_first), &EvalConfig::default()).unwrap();

    // visualize fixture: input scene, one detection, overlay rendered by the
    // actual binary (review the overlay by eye after regenerating)
    let mut scene = algaeval_core::imgio::Image::filled_rgb(64, 48, [40, 44, 60]);
    for y in 12..36 {
        for x in 13..45 {
            scene.set_rgb(x, y, [30, 190, 60]);
        }
    }
    std::fs::write(dir.join("visualize_input.ppm"), scene.encode_ppm().unwrap()).unwrap();
    let overlay_dets = vec![Detection::new(
        "visualize_input",
        1,
        0.87,
        BoundingBox::normalized(13.0 / 64.0, 0.25, 45.0 / 64.0, 0.75).unwrap(),
    )
    .unwrap()];
    std::fs::write(
        dir.join("visualize_detections.json"),
        detections_to_json(&overlay_dets) + "\n",
    )
    .unwrap();
    let status = std::process::Command::new(common::algaeval_bin())
        .args([
            "visualize",
            "--image",
            dir.join("visualize_input.ppm").to_str().unwrap(),
            "--detections",
            dir.join("visualize_detections.json").to_str().unwrap(),
            "--output",
            dir.join("visualize_overlay.ppm").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
}
