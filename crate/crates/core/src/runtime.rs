//! Detector backends, frame-stream execution, and throughput benchmarking.
//!
//! A backend is anything that answers [`FrameRequest`]s with
//! [`DetectionBatch`]es in order: the built-in baseline detector, or an
//! external process speaking newline-delimited JSON over stdin/stdout
//! (request `{"image_path":"...","image_id":"..."}`, response
//! `{"image_id":"...","boxes":[[y,x,y,x],...],"scores":[...],"classes":[...],
//! "num_detections":N}`, one response per request, same order).
//!
//! A run is confined to one controlling thread; the child-process reader is
//! the only helper thread and communicates over a channel so per-frame
//! timeouts work.

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{self, ColorThresholds};
use crate::geometry::{BoundingBox, Denormalized, GeometryError, ImageSize, ScaleMode};
use crate::imgio::Image;
use crate::metrics::Detection;

/// Environment variable overriding the per-frame backend timeout (seconds).
pub const TIMEOUT_ENV_VAR: &str = "ALGAEVAL_BACKEND_TIMEOUT_SECS";

const DEFAULT_TIMEOUT_SECS: u64 = 30;

/// Per-frame timeout: `ALGAEVAL_BACKEND_TIMEOUT_SECS` when set and parseable,
/// otherwise 30 seconds.
pub fn backend_timeout() -> Duration {
    let secs = std::env::var(TIMEOUT_ENV_VAR)
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(DEFAULT_TIMEOUT_SECS);
    Duration::from_secs(secs)
}

#[derive(Debug, Error)]
pub enum BackendError {
    /// The backend process is gone; the run cannot continue.
    #[error("backend exited: {0}")]
    Crashed(String),
    #[error("i/o error talking to backend: {0}")]
    Io(#[from] std::io::Error),
    /// A malformed response; the run may continue with the next frame.
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("no response within {0:.0?}")]
    Timeout(Duration),
    /// The frame itself could not be processed (e.g. unreadable image).
    #[error("frame error: {0}")]
    Frame(String),
}

impl BackendError {
    /// Fatal errors abort the run; the rest are recorded per frame.
    pub fn is_fatal(&self) -> bool {
        matches!(self, BackendError::Crashed(_) | BackendError::Io(_))
    }
}

/// One unit of work sent to a backend.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameRequest {
    pub image_path: String,
    pub image_id: String,
}

impl FrameRequest {
    pub fn new(path: &Path, image_id: impl Into<String>) -> Self {
        Self {
            image_path: path.display().to_string(),
            image_id: image_id.into(),
        }
    }

    /// Derive the conventional image id (file stem) from a path.
    pub fn id_for_path(path: &Path) -> String {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    }
}

/// Per-image detector output: the four parallel arrays. Boxes are normalized
/// `[y_min, x_min, y_max, x_max]`; entries beyond `num_detections` are
/// ignored and dropped at ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionBatch {
    pub image_id: String,
    pub boxes: Vec<[f64; 4]>,
    pub scores: Vec<f64>,
    pub classes: Vec<u32>,
    pub num_detections: usize,
}

impl DetectionBatch {
    pub fn empty(image_id: impl Into<String>) -> Self {
        Self {
            image_id: image_id.into(),
            boxes: Vec::new(),
            scores: Vec::new(),
            classes: Vec::new(),
            num_detections: 0,
        }
    }

    /// Check the wire invariants: the three lists share one length that is at
    /// least `num_detections`, and every counted entry has a valid score and
    /// normalized box.
    pub fn validate(&self) -> Result<(), BackendError> {
        let n = self.boxes.len();
        if self.scores.len() != n || self.classes.len() != n {
            return Err(BackendError::Protocol(format!(
                "mismatched list lengths: boxes {}, scores {}, classes {}",
                self.boxes.len(),
                self.scores.len(),
                self.classes.len()
            )));
        }
        if n < self.num_detections {
            return Err(BackendError::Protocol(format!(
                "num_detections {} exceeds list length {n}",
                self.num_detections
            )));
        }
        for i in 0..self.num_detections {
            let s = self.scores[i];
            if !(0.0..=1.0).contains(&s) || !s.is_finite() {
                return Err(BackendError::Protocol(format!(
                    "score {s} at index {i} out of [0, 1]"
                )));
            }
            BoundingBox::from_wire_normalized(self.boxes[i])
                .map_err(|e| BackendError::Protocol(format!("box at index {i}: {e}")))?;
        }
        Ok(())
    }

    /// Drop entries beyond `num_detections`.
    pub fn truncate_to_count(&mut self) {
        self.boxes.truncate(self.num_detections);
        self.scores.truncate(self.num_detections);
        self.classes.truncate(self.num_detections);
    }

    /// Convert the counted entries into [`Detection`]s for the metrics layer.
    pub fn to_detections(&self) -> Result<Vec<Detection>, GeometryError> {
        (0..self.num_detections)
            .map(|i| {
                let bbox = BoundingBox::from_wire_normalized(self.boxes[i])?;
                Ok(Detection {
                    image_id: self.image_id.clone(),
                    label_id: self.classes[i],
                    score: self.scores[i],
                    bbox,
                })
            })
            .collect()
    }
}

/// Ordered request/response detector interface.
///
/// `submit` may be called up to the pipelining window ahead of `receive`;
/// responses always come back in submission order.
pub trait DetectorBackend {
    fn submit(&mut self, request: &FrameRequest) -> Result<(), BackendError>;
    fn receive(&mut self) -> Result<DetectionBatch, BackendError>;
}

/// The in-process color-heuristic detector behind the backend interface.
pub struct BuiltinBaselineBackend {
    thresholds: ColorThresholds,
    min_area_fraction: f64,
    queue: VecDeque<FrameRequest>,
}

impl BuiltinBaselineBackend {
    pub fn new(thresholds: ColorThresholds, min_area_fraction: f64) -> Self {
        Self {
            thresholds,
            min_area_fraction,
            queue: VecDeque::new(),
        }
    }
}

impl Default for BuiltinBaselineBackend {
    fn default() -> Self {
        Self::new(ColorThresholds::default(), 0.001)
    }
}

impl DetectorBackend for BuiltinBaselineBackend {
    fn submit(&mut self, request: &FrameRequest) -> Result<(), BackendError> {
        self.queue.push_back(request.clone());
        Ok(())
    }

    fn receive(&mut self) -> Result<DetectionBatch, BackendError> {
        let request = self
            .queue
            .pop_front()
            .ok_or_else(|| BackendError::Protocol("receive without submit".into()))?;
        let image = Image::load(Path::new(&request.image_path))
            .map_err(|e| BackendError::Frame(e.to_string()))?;
        baseline::detect(
            &image,
            &self.thresholds,
            self.min_area_fraction,
            &request.image_id,
        )
        .map_err(|e| BackendError::Frame(e.to_string()))
    }
}

/// A child process speaking the newline-delimited JSON protocol.
pub struct ProcessBackend {
    child: Child,
    stdin: ChildStdin,
    lines: mpsc::Receiver<std::io::Result<String>>,
    pending: VecDeque<String>,
    timeout: Duration,
}

impl ProcessBackend {
    /// Spawn `program` with `args`. The child's stderr passes through to the
    /// parent's so backend diagnostics stay visible.
    pub fn spawn(program: &str, args: &[String], timeout: Duration) -> Result<Self, BackendError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| BackendError::Crashed(format!("failed to start {program:?}: {e}")))?;
        let stdin = child.stdin.take().expect("stdin was piped");
        let stdout = child.stdout.take().expect("stdout was piped");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            child,
            stdin,
            lines: rx,
            pending: VecDeque::new(),
            timeout,
        })
    }

    fn exit_diagnostics(&mut self) -> String {
        match self.child.try_wait() {
            Ok(Some(status)) => format!("exit status {status}"),
            Ok(None) => "stdout closed but process still running".into(),
            Err(e) => format!("could not query exit status: {e}"),
        }
    }
}

impl DetectorBackend for ProcessBackend {
    fn submit(&mut self, request: &FrameRequest) -> Result<(), BackendError> {
        let mut line = serde_json::to_string(request)
            .map_err(|e| BackendError::Protocol(format!("request encode: {e}")))?;
        line.push('\n');
        if let Err(e) = self.stdin.write_all(line.as_bytes()).and_then(|_| self.stdin.flush()) {
            let diag = self.exit_diagnostics();
            return Err(BackendError::Crashed(format!("write failed ({e}); {diag}")));
        }
        self.pending.push_back(request.image_id.clone());
        Ok(())
    }

    fn receive(&mut self) -> Result<DetectionBatch, BackendError> {
        let expected = self
            .pending
            .pop_front()
            .ok_or_else(|| BackendError::Protocol("receive without submit".into()))?;
        let line = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(BackendError::Io(e)),
            Err(mpsc::RecvTimeoutError::Timeout) => {
                return Err(BackendError::Timeout(self.timeout))
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => {
                let diag = self.exit_diagnostics();
                return Err(BackendError::Crashed(diag));
            }
        };
        let mut batch: DetectionBatch = serde_json::from_str(&line)
            .map_err(|e| BackendError::Protocol(format!("response decode: {e}")))?;
        if batch.image_id != expected {
            // a late response for an earlier (timed-out) frame lands here
            return Err(BackendError::Protocol(format!(
                "response image_id {:?} does not match expected {expected:?}",
                batch.image_id
            )));
        }
        batch.validate()?;
        batch.truncate_to_count();
        Ok(batch)
    }
}

impl Drop for ProcessBackend {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A frame that could not be processed; the slot is kept so output stays
/// index-aligned with input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameFailure {
    pub message: String,
}

/// One slot of a run, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub image_id: String,
    pub outcome: Result<DetectionBatch, FrameFailure>,
}

/// Everything a run produced. `abort` carries crash diagnostics when the
/// backend died mid-run; `frames` then holds the partial results.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutcome {
    pub frames: Vec<FrameResult>,
    pub abort: Option<String>,
}

impl RunOutcome {
    pub fn failed_frames(&self) -> usize {
        self.frames.iter().filter(|f| f.outcome.is_err()).count()
    }
}

/// Drive every frame through the backend, up to `max_in_flight` requests
/// ahead, collecting one result per frame in input order.
pub fn run_backend(
    backend: &mut dyn DetectorBackend,
    frames: &[FrameRequest],
    max_in_flight: usize,
) -> RunOutcome {
    let window = max_in_flight.max(1);
    let mut outcome = RunOutcome::default();
    let mut submitted = 0usize;
    while outcome.frames.len() < frames.len() {
        while submitted < frames.len() && submitted - outcome.frames.len() < window {
            if let Err(e) = backend.submit(&frames[submitted]) {
                outcome.abort = Some(e.to_string());
                return outcome;
            }
            submitted += 1;
        }
        let image_id = frames[outcome.frames.len()].image_id.clone();
        match backend.receive() {
            Ok(batch) => outcome.frames.push(FrameResult {
                image_id,
                outcome: Ok(batch),
            }),
            Err(e) if e.is_fatal() => {
                outcome.abort = Some(e.to_string());
                return outcome;
            }
            Err(e) => outcome.frames.push(FrameResult {
                image_id,
                outcome: Err(FrameFailure {
                    message: e.to_string(),
                }),
            }),
        }
    }
    outcome
}

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("warmup {warmup} must be smaller than the frame count {frames}")]
    WarmupTooLarge { warmup: usize, frames: usize },
    #[error("max_in_flight must be >= 1")]
    ZeroInFlight,
    #[error("benchmark needs at least one frame")]
    NoFrames,
    #[error("backend failed: {0}")]
    Aborted(String),
}

/// Throughput and latency measurements for one backend over one frame list.
///
/// `fps * wall_time_secs` equals the post-warmup frame count by construction;
/// percentiles are nearest-rank over the retained per-frame latencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub frames_total: usize,
    pub frames_warmup: usize,
    pub frame_errors: usize,
    pub max_in_flight: usize,
    pub wall_time_secs: f64,
    pub fps: f64,
    pub latency_p50_ms: f64,
    pub latency_p95_ms: f64,
    /// Post-warmup per-frame latencies, in completion order.
    pub latencies_ms: Vec<f64>,
}

impl BenchmarkReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Nearest-rank percentile (`p` in (0, 100]) of an unsorted sample.
pub fn percentile_nearest_rank(samples: &[f64], p: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("latencies are finite"));
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Run all frames and time the post-warmup portion. The wall clock starts
/// when the last warmup frame completes; frame errors count as completed
/// frames (their latency is still the submit-to-verdict interval).
pub fn benchmark(
    backend: &mut dyn DetectorBackend,
    frames: &[FrameRequest],
    warmup: usize,
    max_in_flight: usize,
) -> Result<BenchmarkReport, BenchmarkError> {
    if frames.is_empty() {
        return Err(BenchmarkError::NoFrames);
    }
    if warmup >= frames.len() {
        return Err(BenchmarkError::WarmupTooLarge {
            warmup,
            frames: frames.len(),
        });
    }
    if max_in_flight == 0 {
        return Err(BenchmarkError::ZeroInFlight);
    }

    let mut submit_times: Vec<Option<Instant>> = vec![None; frames.len()];
    let mut latencies_ms = Vec::with_capacity(frames.len() - warmup);
    let mut frame_errors = 0usize;
    let mut completed = 0usize;
    let mut submitted = 0usize;
    let mut wall_start = if warmup == 0 { Some(Instant::now()) } else { None };

    while completed < frames.len() {
        while submitted < frames.len() && submitted - completed < max_in_flight {
            submit_times[submitted] = Some(Instant::now());
            backend
                .submit(&frames[submitted])
                .map_err(|e| BenchmarkError::Aborted(e.to_string()))?;
            submitted += 1;
        }
        let verdict = backend.receive();
        let done = Instant::now();
        match verdict {
            Err(e) if e.is_fatal() => return Err(BenchmarkError::Aborted(e.to_string())),
            Err(_) => frame_errors += 1,
            Ok(_) => {}
        }
        if completed >= warmup {
            let started = submit_times[completed].expect("completed frames were submitted");
            latencies_ms.push(done.duration_since(started).as_secs_f64() * 1000.0);
        }
        completed += 1;
        if completed == warmup {
            wall_start = Some(done);
        }
    }

    let wall_time_secs = wall_start
        .expect("warmup < frame count guarantees a start point")
        .elapsed()
        .as_secs_f64();
    let measured = frames.len() - warmup;
    Ok(BenchmarkReport {
        frames_total: frames.len(),
        frames_warmup: warmup,
        frame_errors,
        max_in_flight,
        wall_time_secs,
        fps: measured as f64 / wall_time_secs,
        latency_p50_ms: percentile_nearest_rank(&latencies_ms, 50.0),
        latency_p95_ms: percentile_nearest_rank(&latencies_ms, 95.0),
        latencies_ms,
    })
}

/// A thresholded, pixel-space detection ready for display.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredBox {
    pub label_id: u32,
    pub score: f64,
    pub bbox: BoundingBox,
    /// True when coordinate conversion had to clip the box.
    pub clamped: bool,
}

/// Keep detections scoring strictly above the threshold, reorder their wire
/// boxes to the internal corner order, scale to pixels, and clip to the
/// image. Output boxes never extend outside the image.
pub fn threshold_and_convert(
    batch: &DetectionBatch,
    size: ImageSize,
    score_threshold: f64,
    mode: ScaleMode,
) -> Result<Vec<ScoredBox>, BackendError> {
    batch.validate()?;
    let mut out = Vec::new();
    for i in 0..batch.num_detections {
        if batch.scores[i] <= score_threshold {
            continue;
        }
        let normalized = BoundingBox::from_wire_normalized(batch.boxes[i])
            .map_err(|e| BackendError::Protocol(e.to_string()))?;
        let Denormalized { bbox, clamped } = normalized
            .denormalize(size, mode)
            .map_err(|e| BackendError::Protocol(e.to_string()))?;
        out.push(ScoredBox {
            label_id: batch.classes[i],
            score: batch.scores[i],
            bbox,
            clamped,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scripted in-process backend for driving the run loop.
    struct ScriptBackend {
        responses: VecDeque<Result<DetectionBatch, BackendError>>,
        pending: VecDeque<String>,
        delay: Duration,
        max_observed_in_flight: usize,
    }

    impl ScriptBackend {
        fn empty_ok(n: usize) -> Self {
            Self {
                responses: VecDeque::new(),
                pending: VecDeque::new(),
                delay: Duration::ZERO,
                max_observed_in_flight: 0,
            }
            .with_empties(n)
        }

        fn with_empties(mut self, n: usize) -> Self {
            for _ in 0..n {
                self.responses.push_back(Ok(DetectionBatch::empty("")));
            }
            self
        }
    }

    impl DetectorBackend for ScriptBackend {
        fn submit(&mut self, request: &FrameRequest) -> Result<(), BackendError> {
            self.pending.push_back(request.image_id.clone());
            self.max_observed_in_flight = self.max_observed_in_flight.max(self.pending.len());
            Ok(())
        }

        fn receive(&mut self) -> Result<DetectionBatch, BackendError> {
            if !self.delay.is_zero() {
                std::thread::sleep(self.delay);
            }
            let id = self
                .pending
                .pop_front()
                .ok_or_else(|| BackendError::Protocol("receive without submit".into()))?;
            match self.responses.pop_front() {
                Some(Ok(mut batch)) => {
                    batch.image_id = id;
                    Ok(batch)
                }
                Some(Err(e)) => Err(e),
                None => Err(BackendError::Crashed("script exhausted".into())),
            }
        }
    }

    fn requests(n: usize) -> Vec<FrameRequest> {
        (0..n)
            .map(|i| FrameRequest {
                image_path: format!("frame-{i:03}.ppm"),
                image_id: format!("frame-{i:03}"),
            })
            .collect()
    }

    #[test]
    fn run_preserves_order_and_count() {
        let frames = requests(5);
        let mut backend = ScriptBackend::empty_ok(5);
        let outcome = run_backend(&mut backend, &frames, 1);
        assert!(outcome.abort.is_none());
        assert_eq!(outcome.frames.len(), 5);
        for (frame, req) in outcome.frames.iter().zip(&frames) {
            assert_eq!(frame.image_id, req.image_id);
            assert!(frame.outcome.is_ok());
        }
    }

    #[test]
    fn per_frame_errors_do_not_abort() {
        let frames = requests(3);
        let mut backend = ScriptBackend::empty_ok(0);
        backend.responses.push_back(Ok(DetectionBatch::empty("")));
        backend
            .responses
            .push_back(Err(BackendError::Protocol("mismatched list lengths".into())));
        backend.responses.push_back(Ok(DetectionBatch::empty("")));
        let outcome = run_backend(&mut backend, &frames, 1);
        assert!(outcome.abort.is_none());
        assert_eq!(outcome.frames.len(), 3);
        assert_eq!(outcome.failed_frames(), 1);
        assert!(outcome.frames[1].outcome.is_err());
    }

    #[test]
    fn crash_aborts_with_partial_results() {
        let frames = requests(4);
        let mut backend = ScriptBackend::empty_ok(0);
        backend.responses.push_back(Ok(DetectionBatch::empty("")));
        backend
            .responses
            .push_back(Err(BackendError::Crashed("exit status 1".into())));
        let outcome = run_backend(&mut backend, &frames, 1);
        assert_eq!(outcome.frames.len(), 1);
        assert!(outcome.abort.as_deref().unwrap_or("").contains("exit status 1"));
    }

    #[test]
    fn pipelining_window_is_respected() {
        let frames = requests(10);
        let mut backend = ScriptBackend::empty_ok(10);
        let outcome = run_backend(&mut backend, &frames, 3);
        assert!(outcome.abort.is_none());
        assert_eq!(backend.max_observed_in_flight, 3);

        let mut serial = ScriptBackend::empty_ok(10);
        run_backend(&mut serial, &frames, 1);
        assert_eq!(serial.max_observed_in_flight, 1);
    }

    #[test]
    fn batch_validation_catches_wire_violations() {
        let mut batch = DetectionBatch::empty("x");
        batch.boxes.push([0.0, 0.0, 1.0, 1.0]);
        batch.num_detections = 1;
        // scores/classes are short
        assert!(batch.validate().is_err());

        batch.scores.push(0.5);
        batch.classes.push(1);
        assert!(batch.validate().is_ok());

        batch.num_detections = 2;
        assert!(batch.validate().is_err());

        batch.num_detections = 1;
        batch.scores[0] = 1.5;
        assert!(batch.validate().is_err());

        batch.scores[0] = 0.5;
        batch.boxes[0] = [0.9, 0.0, 0.1, 1.0]; // y_min > y_max
        assert!(batch.validate().is_err());
    }

    #[test]
    fn extra_entries_are_dropped_at_ingestion() {
        let mut batch = DetectionBatch {
            image_id: "x".into(),
            boxes: vec![[0.0, 0.0, 1.0, 1.0], [0.0, 0.0, 0.5, 0.5]],
            scores: vec![0.9, 0.8],
            classes: vec![1, 1],
            num_detections: 1,
        };
        batch.validate().unwrap();
        batch.truncate_to_count();
        assert_eq!(batch.boxes.len(), 1);
        assert_eq!(batch.to_detections().unwrap().len(), 1);
    }

    #[test]
    fn benchmark_counts_and_identity() {
        let frames = requests(30);
        let mut backend = ScriptBackend::empty_ok(30);
        backend.delay = Duration::from_millis(2);
        let report = benchmark(&mut backend, &frames, 5, 1).unwrap();
        assert_eq!(report.frames_total, 30);
        assert_eq!(report.frames_warmup, 5);
        assert_eq!(report.latencies_ms.len(), 25);
        let identity = report.fps * report.wall_time_secs;
        assert!((identity - 25.0).abs() < 1e-9, "fps*wall = {identity}");
        // with serial dispatch, latency cannot undercut the service time
        assert!(report.latency_p50_ms >= 2.0, "p50 {}", report.latency_p50_ms);
    }

    #[test]
    fn benchmark_validates_arguments() {
        let frames = requests(3);
        let mut backend = ScriptBackend::empty_ok(3);
        assert!(matches!(
            benchmark(&mut backend, &frames, 3, 1),
            Err(BenchmarkError::WarmupTooLarge { .. })
        ));
        assert!(matches!(
            benchmark(&mut backend, &frames, 0, 0),
            Err(BenchmarkError::ZeroInFlight)
        ));
        assert!(matches!(
            benchmark(&mut backend, &[], 0, 1),
            Err(BenchmarkError::NoFrames)
        ));
    }

    #[test]
    fn percentiles_use_nearest_rank() {
        let samples: Vec<f64> = (1..=100).map(|v| v as f64).collect();
        assert_eq!(percentile_nearest_rank(&samples, 50.0), 50.0);
        assert_eq!(percentile_nearest_rank(&samples, 95.0), 95.0);
        assert_eq!(percentile_nearest_rank(&samples, 100.0), 100.0);
        assert_eq!(percentile_nearest_rank(&[7.0], 50.0), 7.0);
        assert_eq!(percentile_nearest_rank(&[], 50.0), 0.0);
    }

    #[test]
    fn threshold_and_convert_filters_and_scales() {
        let size = ImageSize::new(640, 480).unwrap();
        let batch = DetectionBatch {
            image_id: "x".into(),
            boxes: vec![[0.0, 0.0, 1.0, 1.0], [0.1, 0.1, 0.2, 0.2]],
            scores: vec![0.9, 0.4],
            classes: vec![1, 1],
            num_detections: 2,
        };
        let kept = threshold_and_convert(&batch, size, 0.5, ScaleMode::PerAxis).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(
            kept[0].bbox,
            BoundingBox::pixel(0.0, 0.0, 640.0, 480.0).unwrap()
        );
        assert!(!kept[0].clamped);
    }

    #[test]
    fn threshold_and_convert_boundary_score_is_dropped() {
        let size = ImageSize::new(10, 10).unwrap();
        let batch = DetectionBatch {
            image_id: "x".into(),
            boxes: vec![[0.0, 0.0, 1.0, 1.0]],
            scores: vec![0.5],
            classes: vec![1],
            num_detections: 1,
        };
        let kept = threshold_and_convert(&batch, size, 0.5, ScaleMode::PerAxis).unwrap();
        assert!(kept.is_empty());
    }

    #[test]
    fn width_all_mode_scales_y_by_width_and_clamps() {
        let size = ImageSize::new(640, 480).unwrap();
        let batch = DetectionBatch {
            image_id: "x".into(),
            boxes: vec![[0.5, 0.25, 1.0, 0.75]], // (y,x,y,x)
            scores: vec![0.9],
            classes: vec![1],
            num_detections: 1,
        };
        let kept = threshold_and_convert(&batch, size, 0.5, ScaleMode::WidthAll).unwrap();
        // y scaled by 640: (320, 640) then clipped to 480
        assert_eq!(
            kept[0].bbox,
            BoundingBox::pixel(160.0, 320.0, 480.0, 480.0).unwrap()
        );
        assert!(kept[0].clamped);
        let size_sq = ImageSize::new(480, 480).unwrap();
        let kept = threshold_and_convert(&batch, size_sq, 0.5, ScaleMode::WidthAll).unwrap();
        assert!(!kept[0].clamped, "square images never clip in width mode");
    }

    #[test]
    fn request_id_from_path() {
        assert_eq!(
            FrameRequest::id_for_path(Path::new("/tmp/frames/img-007.ppm")),
            "img-007"
        );
    }
}
