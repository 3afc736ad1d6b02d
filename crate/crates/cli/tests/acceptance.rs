//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p storyboard-cli --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::json;
use tower::ServiceExt;

use storyboard_cli::commands::BenchReport;
use storyboard_core::pipeline::bundled_styles;
use storyboard_service::{router, AppState, Store};
use storyboard_testkit::checks::{self, Outcome};

const BENCH_LIMIT_MS: f64 = 2000.0;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn storyboard(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_storyboard"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn outcome(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome { name, passed, detail, elapsed: t.elapsed() }
}

fn read_pages(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "png"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn end_to_end_determinism() -> Outcome {
    outcome("end-to-end determinism", || {
        let frames = fixtures().join("frames");
        let runs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
        for dir in &runs {
            storyboard(&[
                "storyboard",
                "--in",
                frames.to_str().unwrap(),
                "--count",
                "14",
                "--seed",
                "42",
                "--out",
                dir.path().to_str().unwrap(),
            ])?;
        }
        let (a, b) = (read_pages(runs[0].path()), read_pages(runs[1].path()));
        let same = a == b;
        let detail = format!("{} and {} pages, identical: {same}", a.len(), b.len());
        if same && a.len() == 14 {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

fn performance() -> Outcome {
    outcome("performance target", || {
        let dir = tempfile::tempdir().unwrap();
        let mut parts = Vec::new();
        let mut passed = true;
        for style in bundled_styles() {
            let path = dir.path().join(format!("{}.json", style.name));
            storyboard(&["bench", "--style", &style.name, "--out", path.to_str().unwrap()])?;
            let report: BenchReport = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
            let slowest = report
                .blocks
                .iter()
                .max_by(|a, b| a.median_ms.total_cmp(&b.median_ms))
                .map(|b| format!("{} {:.0}", b.label, b.median_ms))
                .unwrap_or_default();
            passed &= (report.width, report.height) == (1920, 1080) && report.total_median_ms <= BENCH_LIMIT_MS;
            parts.push(format!("{} {:.0} ms (slowest {slowest})", style.name, report.total_median_ms));
        }
        let detail = format!("{}; limit {BENCH_LIMIT_MS} ms", parts.join(", "));
        if passed {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

async fn preview(app: &axum::Router, image_id: &str, style: &str) -> Result<Vec<u8>, String> {
    let body = json!({ "image_id": image_id, "style": style, "max_dim": 720 }).to_string();
    let req = Request::post("/api/preview")
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    if status == StatusCode::OK {
        Ok(bytes)
    } else {
        Err(format!("preview {status}: {}", String::from_utf8_lossy(&bytes)))
    }
}

async fn upload(app: &axum::Router, png: &[u8]) -> Result<String, String> {
    let boundary = "acceptance-boundary";
    let mut body = format!(
        "--{boundary}\r\nContent-Disposition: form-data; name=\"image\"; filename=\"in.png\"\r\nContent-Type: image/png\r\n\r\n"
    )
    .into_bytes();
    body.extend_from_slice(png);
    body.extend_from_slice(format!("\r\n--{boundary}--\r\n").as_bytes());
    let req = Request::post("/api/images")
        .header(header::CONTENT_TYPE, format!("multipart/form-data; boundary={boundary}"))
        .body(Body::from(body))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    if status != StatusCode::CREATED {
        return Err(format!("upload {status}: {}", String::from_utf8_lossy(&bytes)));
    }
    let v: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
    Ok(v["image_id"].as_str().unwrap_or_default().to_string())
}

fn parity() -> Outcome {
    outcome("CLI/service parity", || {
        let data = tempfile::tempdir().unwrap();
        let out = tempfile::tempdir().unwrap();
        let app = router(Arc::new(AppState { store: Store::open(data.path()).unwrap() }), None);
        let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap();
        let pairs = [
            (fixtures().join("sample.png"), "ink-lines"),
            (fixtures().join("frames/frame-03.png"), "tinted-flow"),
            (fixtures().join("sample.png"), "poster-color"),
        ];
        let mut matched = 0;
        for (image, style) in &pairs {
            let cli_out = out.path().join(format!("{style}.png"));
            storyboard(&[
                "stylize",
                "--in",
                image.to_str().unwrap(),
                "--style",
                style,
                "--out",
                cli_out.to_str().unwrap(),
                "--max-dim",
                "720",
            ])?;
            let served = rt.block_on(async {
                let id = upload(&app, &fs::read(image).unwrap()).await?;
                preview(&app, &id, style).await
            })?;
            if fs::read(&cli_out).unwrap() == served {
                matched += 1;
            }
        }
        let detail = format!("{matched}/{} style-image pairs byte-identical", pairs.len());
        if matched == pairs.len() {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

#[test]
fn acceptance() {
    let runs: [fn() -> Outcome; 10] = [
        checks::filter_oracle_suite,
        checks::formula_spot_checks,
        checks::tv_monotonicity,
        checks::hash_properties,
        checks::sharpness_ordering,
        checks::procedural_distribution,
        checks::framing,
        end_to_end_determinism,
        performance,
        parity,
    ];
    let mut failed = Vec::new();
    for run in runs {
        let o = run();
        println!("{o}");
        if !o.passed {
            failed.push(o.name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
