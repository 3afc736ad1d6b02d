use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use storyboard_core::imaging::fit_max_dim;
use storyboard_core::imaging::io::{decode, encode_png};
use storyboard_core::pipeline::{bundled_styles, stylize};
use storyboard_core::synth;
use storyboard_core::ImageBuffer;
use storyboard_service::{router, AppState, Store};

const BOUNDARY: &str = "----storyboard-test-boundary";

fn app(dir: &std::path::Path) -> Router {
    router(Arc::new(AppState { store: Store::open(dir).unwrap() }), None)
}

fn multipart(png: &[u8]) -> Vec<u8> {
    let mut body = format!(
        "--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"image\"; filename=\"frame.png\"\r\nContent-Type: image/png\r\n\r\n"
    )
    .into_bytes();
    body.extend_from_slice(png);
    body.extend_from_slice(format!("\r\n--{BOUNDARY}--\r\n").as_bytes());
    body
}

struct Reply {
    status: StatusCode,
    headers: axum::http::HeaderMap,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("not JSON ({e}): {}", String::from_utf8_lossy(&self.body)))
    }

    fn assert_error(&self, status: StatusCode) -> Value {
        assert_eq!(self.status, status, "{}", String::from_utf8_lossy(&self.body));
        let v = self.json();
        assert!(v["code"].is_string() && v["message"].is_string() && v.get("details").is_some(), "{v}");
        v
    }
}

async fn send(app: &Router, req: Request<Body>) -> Reply {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let headers = res.headers().clone();
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, headers, body }
}

async fn get(app: &Router, uri: &str) -> Reply {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post_json(app: &Router, uri: &str, body: &Value) -> Reply {
    post_raw(app, uri, body.to_string()).await
}

async fn post_raw(app: &Router, uri: &str, body: String) -> Reply {
    let req = Request::post(uri).header(header::CONTENT_TYPE, "application/json").body(Body::from(body)).unwrap();
    send(app, req).await
}

async fn upload_in(app: &Router, session: Option<&str>, img: &ImageBuffer) -> String {
    let mut req = Request::post("/api/images")
        .header(header::CONTENT_TYPE, format!("multipart/form-data; boundary={BOUNDARY}"));
    if let Some(s) = session {
        req = req.header("x-session-id", s);
    }
    let reply = send(app, req.body(Body::from(multipart(&encode_png(img).unwrap()))).unwrap()).await;
    assert_eq!(reply.status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&reply.body));
    reply.json()["image_id"].as_str().unwrap().to_string()
}

async fn upload(app: &Router, img: &ImageBuffer) -> String {
    upload_in(app, None, img).await
}

#[tokio::test]
async fn catalog_is_complete_and_stable() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let a = get(&app, "/api/filters").await;
    assert_eq!(a.status, StatusCode::OK);
    let v = a.json();
    let filters = v["filters"].as_array().unwrap();
    assert_eq!(filters.len(), 20);
    for f in filters {
        for p in f["params"].as_array().unwrap() {
            assert!(p["min"].is_number() && p["max"].is_number() && p["default"].is_number(), "{p}");
        }
    }
    assert_eq!(a.body, get(&app, "/api/filters").await.body);
}

#[tokio::test]
async fn preview_matches_library_output() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let img = synth::scene(5, 900, 500);
    let id = upload(&app, &img).await;

    let empty = json!({ "schema_version": 1, "name": "empty", "background": [] });
    let reply = post_json(&app, "/api/preview", &json!({ "image_id": id, "style": empty })).await;
    assert_eq!(reply.status, StatusCode::OK);
    assert_eq!(reply.headers[header::CONTENT_TYPE], "image/png");
    assert_eq!(decode(&reply.body).unwrap(), fit_max_dim(&img, 720).unwrap());

    let style = &bundled_styles()[3];
    let reply = post_json(&app, "/api/preview", &json!({ "image_id": id, "style": style.name, "max_dim": 320 })).await;
    assert_eq!(reply.status, StatusCode::OK);
    assert_eq!(reply.body, encode_png(&stylize(style, &img, Some(320)).unwrap()).unwrap());
}

#[tokio::test]
async fn preview_errors() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = upload(&app, &synth::scene(1, 64, 48)).await;

    post_json(&app, "/api/preview", &json!({ "image_id": "0123456789abcdef", "style": "hatched" }))
        .await
        .assert_error(StatusCode::NOT_FOUND);

    let bad = json!({ "schema_version": 1, "name": "bad", "background": [{ "kind": "ToColor" }] });
    let v = post_json(&app, "/api/preview", &json!({ "image_id": id, "style": bad }))
        .await
        .assert_error(StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["details"][0]["message"].as_str().unwrap().contains("ToColor"), "{v}");

    let unknown_kind = json!({ "schema_version": 1, "name": "x", "background": [{ "kind": "Nope" }] });
    post_json(&app, "/api/preview", &json!({ "image_id": id, "style": unknown_kind }))
        .await
        .assert_error(StatusCode::UNPROCESSABLE_ENTITY);

    post_raw(&app, "/api/preview", "{\"image_id\": ".into()).await.assert_error(StatusCode::BAD_REQUEST);
    post_json(&app, "/api/preview", &json!({ "style": "hatched" })).await.assert_error(StatusCode::BAD_REQUEST);
    post_json(&app, "/api/preview", &json!({ "image_id": id, "style": "missing" }))
        .await
        .assert_error(StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn styles_are_saved_versioned_and_listed() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let doc = |name: &str, sigma: f64| {
        json!({ "schema_version": 1, "name": name, "background": [{ "kind": "Gaussian", "params": { "sigma": sigma } }] })
    };
    let r1 = post_json(&app, "/api/styles", &doc("soft", 2.0)).await;
    assert_eq!(r1.status, StatusCode::CREATED);
    assert_eq!(r1.json()["version"], 1);
    let r2 = post_json(&app, "/api/styles", &doc("soft", 3.0)).await;
    assert_eq!(r2.json()["version"], 2);

    let list = get(&app, "/api/styles").await.json();
    assert_eq!(list["version"], 2);
    let names: Vec<&str> = list["styles"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["ink-lines", "tinted-flow", "poster-color", "hatched", "soft"]);

    let saved = get(&app, "/api/styles/soft").await.json();
    assert_eq!(saved["background"][0]["params"]["sigma"], 3.0);
    assert_eq!(get(&app, "/api/styles/hatched").await.status, StatusCode::OK);
    get(&app, "/api/styles/nothing").await.assert_error(StatusCode::NOT_FOUND);

    post_json(&app, "/api/styles", &doc("hatched", 1.0)).await.assert_error(StatusCode::CONFLICT);
    post_json(&app, "/api/styles", &doc("../escape", 1.0)).await.assert_error(StatusCode::UNPROCESSABLE_ENTITY);
    let invalid = json!({ "schema_version": 1, "name": "broken", "background": [{ "kind": "ToColor" }] });
    post_json(&app, "/api/styles", &invalid).await.assert_error(StatusCode::UNPROCESSABLE_ENTITY);
    post_raw(&app, "/api/styles", "not json".into()).await.assert_error(StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn concurrent_style_writes_get_distinct_versions() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let mut tasks = Vec::new();
    for i in 0..8 {
        let app = app.clone();
        tasks.push(tokio::spawn(async move {
            let doc = json!({ "schema_version": 1, "name": format!("s{i}"), "background": [] });
            let reply = post_json(&app, "/api/styles", &doc).await;
            assert_eq!(reply.status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&reply.body));
            reply.json()["version"].as_u64().unwrap()
        }));
    }
    let mut versions = Vec::new();
    for t in tasks {
        versions.push(t.await.unwrap());
    }
    versions.sort();
    assert_eq!(versions, (1..=8).collect::<Vec<_>>());
}

#[tokio::test]
async fn storyboards_are_seeded_and_retrievable() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let mut ids = Vec::new();
    for frame in synth::video_frames(3, 6, 160, 90) {
        ids.push(upload(&app, &frame).await);
    }
    let req = json!({ "image_ids": ids, "count": 3, "seed": 9, "page_width": 400 });
    let a = post_json(&app, "/api/storyboards", &req).await;
    assert_eq!(a.status, StatusCode::OK, "{}", String::from_utf8_lossy(&a.body));
    let pages = a.json();
    let pages = pages.as_array().unwrap();
    assert_eq!(pages.len(), 3);
    let mut first = Vec::new();
    for p in pages {
        assert!(p["layout_id"].is_string() && p["style_name"].is_string());
        let page = get(&app, p["page"].as_str().unwrap()).await;
        assert_eq!(page.status, StatusCode::OK);
        assert_eq!(decode(&page.body).unwrap().width(), 400);
        first.push(page.body);
    }
    let b = post_json(&app, "/api/storyboards", &req).await.json();
    for (p, bytes) in b.as_array().unwrap().iter().zip(&first) {
        assert_eq!(&get(&app, p["page"].as_str().unwrap()).await.body, bytes);
    }
    assert_eq!(a.json(), b);

    let none = post_json(&app, "/api/storyboards", &json!({ "image_ids": ids, "count": 0 })).await;
    assert_eq!(none.json(), json!([]));
    post_json(&app, "/api/storyboards", &json!({ "image_ids": [], "count": 2 }))
        .await
        .assert_error(StatusCode::CONFLICT);
    post_json(&app, "/api/storyboards", &json!({ "image_ids": ["ffffffffffffffff"], "count": 2 }))
        .await
        .assert_error(StatusCode::NOT_FOUND);
    get(&app, "/api/pages/ffff-00").await.assert_error(StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn sessions_are_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = upload_in(&app, Some("alice"), &synth::scene(2, 40, 30)).await;
    let req = |session: &str| {
        Request::post("/api/preview")
            .header("x-session-id", session)
            .body(Body::from(json!({ "image_id": id, "style": "hatched" }).to_string()))
            .unwrap()
    };
    assert_eq!(send(&app, req("alice")).await.status, StatusCode::OK);
    send(&app, req("bob")).await.assert_error(StatusCode::NOT_FOUND);
    send(&app, req("no spaces")).await.assert_error(StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn restart_reproduces_previews() {
    let dir = tempfile::tempdir().unwrap();
    let img = synth::scene(8, 200, 120);
    let (id, before) = {
        let app = app(dir.path());
        let id = upload(&app, &img).await;
        post_json(&app, "/api/styles", &json!({ "schema_version": 1, "name": "mine", "background": [{ "kind": "Posterize" }] })).await;
        let body = post_json(&app, "/api/preview", &json!({ "image_id": id, "style": "mine" })).await.body;
        (id, body)
    };
    let app = app(dir.path());
    let after = post_json(&app, "/api/preview", &json!({ "image_id": id, "style": "mine" })).await;
    assert_eq!(after.status, StatusCode::OK);
    assert_eq!(after.body, before);
}

#[tokio::test]
async fn uploads_must_be_images() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let req = Request::post("/api/images")
        .header(header::CONTENT_TYPE, format!("multipart/form-data; boundary={BOUNDARY}"))
        .body(Body::from(multipart(b"not a png")))
        .unwrap();
    send(&app, req).await.assert_error(StatusCode::BAD_REQUEST);
    let req = Request::post("/api/images").body(Body::from("x")).unwrap();
    send(&app, req).await.assert_error(StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn cors_and_unknown_routes() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let req = Request::get("/api/filters").header(header::ORIGIN, "http://localhost:5173").body(Body::empty()).unwrap();
    let reply = send(&app, req).await;
    assert_eq!(reply.headers[header::ACCESS_CONTROL_ALLOW_ORIGIN], "*");
    get(&app, "/api/nope").await.assert_error(StatusCode::NOT_FOUND);
}
