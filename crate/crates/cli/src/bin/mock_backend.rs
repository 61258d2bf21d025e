//! Reference / test backend for the detector wire protocol.
//!
//! Reads one JSON request per line from stdin
//! (`{"image_path":"...","image_id":"..."}`) and answers one JSON response
//! per line on stdout (`{"image_id":...,"boxes":...,"scores":...,
//! "classes":...,"num_detections":N}`), in order. Useful both as a protocol
//! example for backend authors and as a configurable fault injector:
//! fixed per-frame latency, malformed responses, crashes, or stalls.
//!
//! Deliberately independent of the toolkit crates — it exercises the
//! protocol the way an external detector would.

use std::io::{BufRead, Write};

use clap::Parser;
use serde_json::json;

#[derive(Parser)]
#[command(name = "algaeval-mock-backend")]
struct Args {
    /// Sleep this long before answering each request
    #[arg(long, default_value_t = 0)]
    sleep_ms: u64,
    /// What to answer: empty | box | malformed | bad-lengths | wrong-id | stall
    #[arg(long, default_value = "empty")]
    mode: String,
    /// Exit(1) after answering this many requests (0 = never)
    #[arg(long, default_value_t = 0)]
    crash_after: usize,
}

fn main() {
    let args = Args::parse();
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout();
    let mut answered = 0usize;

    for line in stdin.lock().lines() {
        let line = match line {
            Ok(l) if !l.trim().is_empty() => l,
            Ok(_) => continue,
            Err(_) => break,
        };
        let request: serde_json::Value = match serde_json::from_str(&line) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("mock-backend: bad request: {e}");
                std::process::exit(1);
            }
        };
        let image_id = request["image_id"].as_str().unwrap_or("").to_string();

        if args.sleep_ms > 0 {
            std::thread::sleep(std::time::Duration::from_millis(args.sleep_ms));
        }

        let response = match args.mode.as_str() {
            "empty" => json!({
                "image_id": image_id,
                "boxes": [],
                "scores": [],
                "classes": [],
                "num_detections": 0
            })
            .to_string(),
            "box" => json!({
                "image_id": image_id,
                "boxes": [[0.25, 0.25, 0.75, 0.75]],
                "scores": [0.9],
                "classes": [1],
                "num_detections": 1
            })
            .to_string(),
            "malformed" => "this is not json".to_string(),
            "bad-lengths" => json!({
                "image_id": image_id,
                "boxes": [[0.25, 0.25, 0.75, 0.75]],
                "scores": [0.9, 0.8],
                "classes": [1],
                "num_detections": 1
            })
            .to_string(),
            "wrong-id" => json!({
                "image_id": format!("not-{image_id}"),
                "boxes": [],
                "scores": [],
                "classes": [],
                "num_detections": 0
            })
            .to_string(),
            "stall" => loop {
                std::thread::sleep(std::time::Duration::from_secs(3600));
            },
            other => {
                eprintln!("mock-backend: unknown mode {other:?}");
                std::process::exit(1);
            }
        };
        if writeln!(stdout, "{response}").and_then(|_| stdout.flush()).is_err() {
            break;
        }
        answered += 1;
        if args.crash_after > 0 && answered >= args.crash_after {
            std::process::exit(1);
        }
    }
}
