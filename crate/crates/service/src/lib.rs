//! HTTP facade over the storyboard core, driven by the style studio.
//!
//! Every request belongs to a session named by the `x-session-id` header
//! (`default` when absent). Sessions live in directories under the data dir,
//! so a restarted server sees the same images, styles and pages.

mod error;
mod store;

use std::sync::{Arc, OnceLock};

use axum::body::Bytes;
use axum::extract::multipart::MultipartRejection;
use axum::extract::{DefaultBodyLimit, Multipart, Path, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use storyboard_core::filters::catalog_json;
use storyboard_core::imaging::io::encode_png;
use storyboard_core::pipeline::{bundled_styles, parse_value, serialize, stylize, validate, StylePipeline, DEFAULT_PREVIEW_MAX_DIM};
use storyboard_core::storyboard::{bundled_layouts, plan_pages, render_pages, select_frames, Frame, DEFAULT_PAGE_WIDTH, MIN_PAGE_WIDTH};

pub use error::{ApiError, ApiResult};
pub use store::{valid_session_id, valid_style_name, Session, Store, DEFAULT_SESSION};

pub const SESSION_HEADER: &str = "x-session-id";
pub const MAX_UPLOAD_BYTES: usize = 64 * 1024 * 1024;
pub const MAX_STORYBOARD_COUNT: usize = 64;
pub const MAX_PAGE_WIDTH: usize = 4096;

#[derive(Debug)]
pub struct AppState {
    pub store: Store,
}

/// Origins allowed to call the API from a browser; `None` allows any.
pub fn router(state: Arc<AppState>, cors_origins: Option<Vec<HeaderValue>>) -> Router {
    let cors = CorsLayer::new()
        .allow_methods(Any)
        .allow_headers(Any)
        .allow_origin(match cors_origins {
            Some(list) => AllowOrigin::list(list),
            None => AllowOrigin::from(Any),
        });
    Router::new()
        .route("/api/filters", get(filters))
        .route("/api/images", post(upload_image))
        .route("/api/preview", post(preview))
        .route("/api/styles", get(list_styles).post(save_style))
        .route("/api/styles/{name}", get(get_style))
        .route("/api/storyboards", post(create_storyboards))
        .route("/api/pages/{page_id}", get(get_page))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .layer(cors)
        .with_state(state)
}

fn session(state: &AppState, headers: &HeaderMap) -> ApiResult<Arc<Session>> {
    let id = match headers.get(SESSION_HEADER) {
        None => DEFAULT_SESSION,
        Some(v) => v
            .to_str()
            .ok()
            .filter(|s| valid_session_id(s))
            .ok_or_else(|| ApiError::bad_request(format!("{SESSION_HEADER} must be 1-64 of [A-Za-z0-9_-]")))?,
    };
    Ok(state.store.session(id)?)
}

/// Parses a JSON body into `T`; syntax and shape errors are both 400.
fn json_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed JSON body: {e}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

fn png(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "image/png"), (header::CACHE_CONTROL, "no-store")], bytes).into_response()
}

fn json_text(text: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

async fn filters() -> Response {
    static CATALOG: OnceLock<String> = OnceLock::new();
    json_text(CATALOG.get_or_init(catalog_json).clone())
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct UploadResponse {
    pub image_id: String,
    pub width: usize,
    pub height: usize,
}

async fn upload_image(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    multipart: Result<Multipart, MultipartRejection>,
) -> ApiResult<(StatusCode, Json<UploadResponse>)> {
    let session = session(&state, &headers)?;
    let mut multipart = multipart.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let mut bytes = None;
    while let Some(field) = multipart.next_field().await.map_err(|e| ApiError::bad_request(e.body_text()))? {
        if matches!(field.name(), Some("image" | "file")) || field.file_name().is_some() {
            bytes = Some(field.bytes().await.map_err(|e| ApiError::bad_request(e.body_text()))?);
            break;
        }
    }
    let bytes = bytes.ok_or_else(|| ApiError::bad_request("multipart body has no `image` field"))?;
    let (image_id, width, height) = blocking(move || {
        let id = session.put_image(&bytes)?;
        let img = session.image(&id)?.expect("just stored");
        Ok((id, img.width(), img.height()))
    })
    .await?;
    Ok((StatusCode::CREATED, Json(UploadResponse { image_id, width, height })))
}

/// A saved or bundled style by name, saved first.
fn named_style(session: &Session, name: &str) -> ApiResult<Option<StylePipeline>> {
    if let Some(s) = session.style(name)? {
        return Ok(Some(s));
    }
    Ok(bundled_styles().into_iter().find(|s| s.name == name))
}

#[derive(Deserialize)]
struct PreviewRequest {
    image_id: String,
    /// A style document, or the name of a saved or bundled style.
    style: Value,
    max_dim: Option<usize>,
}

async fn preview(State(state): State<Arc<AppState>>, headers: HeaderMap, body: Bytes) -> ApiResult<Response> {
    let session = session(&state, &headers)?;
    let req: PreviewRequest = json_body(&body)?;
    let style = match &req.style {
        Value::String(name) => {
            named_style(&session, name)?.ok_or_else(|| ApiError::not_found(format!("unknown style `{name}`")))?
        }
        Value::Object(_) => parse_value(&req.style)?,
        _ => return Err(ApiError::bad_request("`style` must be a style document or a style name")),
    };
    let errors = validate(&style);
    if !errors.is_empty() {
        return Err(storyboard_core::Error::InvalidPipeline(errors).into());
    }
    let max_dim = req.max_dim.unwrap_or(DEFAULT_PREVIEW_MAX_DIM);
    if max_dim == 0 {
        return Err(ApiError::unprocessable("max_dim must be at least 1"));
    }
    let img = session
        .image(&req.image_id)?
        .ok_or_else(|| ApiError::not_found(format!("unknown image `{}`", req.image_id)))?;
    let bytes = blocking(move || Ok(encode_png(&stylize(&style, &img, Some(max_dim))?)?)).await?;
    Ok(png(bytes))
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SavedStyle {
    pub name: String,
    pub version: u64,
}

async fn save_style(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<SavedStyle>)> {
    let session = session(&state, &headers)?;
    let doc: Value = json_body(&body)?;
    let style = parse_value(&doc)?;
    if !valid_style_name(&style.name) {
        return Err(ApiError::unprocessable(format!(
            "style name `{}` must be 1-100 of letters, digits, space, `-`, `_`, `.` and not start with `.`",
            style.name
        )));
    }
    if bundled_styles().iter().any(|s| s.name == style.name) {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "conflict",
            format!("`{}` is a bundled style name", style.name),
        ));
    }
    let errors = validate(&style);
    if !errors.is_empty() {
        return Err(storyboard_core::Error::InvalidPipeline(errors).into());
    }
    let name = style.name.clone();
    let version = blocking(move || Ok(session.save_style(&style)?)).await?;
    Ok((StatusCode::CREATED, Json(SavedStyle { name, version })))
}

async fn list_styles(State(state): State<Arc<AppState>>, headers: HeaderMap) -> ApiResult<Json<Value>> {
    let session = session(&state, &headers)?;
    let mut styles: Vec<Value> = bundled_styles()
        .iter()
        .map(|s| json!({ "name": s.name, "source": "bundled" }))
        .collect();
    styles.extend(session.styles()?.keys().map(|n| json!({ "name": n, "source": "saved" })));
    Ok(Json(json!({ "version": session.style_version()?, "styles": styles })))
}

async fn get_style(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    Path(name): Path<String>,
) -> ApiResult<Response> {
    let session = session(&state, &headers)?;
    let style = named_style(&session, &name)?.ok_or_else(|| ApiError::not_found(format!("unknown style `{name}`")))?;
    Ok(json_text(serialize(&style)))
}

#[derive(Deserialize)]
struct StoryboardRequest {
    image_ids: Vec<String>,
    count: usize,
    #[serde(default)]
    seed: u64,
    page_width: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PageRef {
    pub layout_id: String,
    pub style_name: String,
    pub page_id: String,
    /// Path that serves the page PNG.
    pub page: String,
}

async fn create_storyboards(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<Vec<PageRef>>> {
    let session = session(&state, &headers)?;
    let req: StoryboardRequest = json_body(&body)?;
    if req.count > MAX_STORYBOARD_COUNT {
        return Err(ApiError::unprocessable(format!("count must be at most {MAX_STORYBOARD_COUNT}")));
    }
    let page_w = req.page_width.unwrap_or(DEFAULT_PAGE_WIDTH);
    if !(MIN_PAGE_WIDTH..=MAX_PAGE_WIDTH).contains(&page_w) {
        return Err(ApiError::unprocessable(format!(
            "page_width must be in [{MIN_PAGE_WIDTH}, {MAX_PAGE_WIDTH}]"
        )));
    }
    let mut frames = Vec::with_capacity(req.image_ids.len());
    for id in &req.image_ids {
        let img = session.image(id)?.ok_or_else(|| ApiError::not_found(format!("unknown image `{id}`")))?;
        frames.push(Frame::new(id.clone(), (*img).clone()));
    }
    if req.count == 0 {
        return Ok(Json(Vec::new()));
    }
    let mut styles = bundled_styles();
    styles.extend(session.styles()?.into_values());

    let pages = blocking(move || {
        let frames = if frames.is_empty() { Vec::new() } else { select_frames(frames)? };
        if frames.is_empty() {
            return Err(ApiError::new(StatusCode::CONFLICT, "no_usable_images", "no usable images after selection")
                .with_details(json!({ "requested": req.image_ids.len() })));
        }
        let layouts = bundled_layouts();
        let plans = plan_pages(frames.len(), &layouts, &styles, req.count, req.seed)?;
        let rendered = render_pages(&frames, &plans, &layouts, &styles, page_w)?;

        let ids = req.image_ids.join("\n");
        let style_docs: Vec<String> = styles.iter().map(serialize).collect();
        let key = store::short_hash(&[
            ids.as_bytes(),
            &req.seed.to_le_bytes(),
            &(req.count as u64).to_le_bytes(),
            &(page_w as u64).to_le_bytes(),
            style_docs.join("\n").as_bytes(),
        ]);
        rendered
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let page_id = format!("{key}-{i:02}");
                session.put_page(&page_id, &encode_png(&p.image)?)?;
                Ok(PageRef {
                    layout_id: p.plan.layout_id.clone(),
                    style_name: p.plan.style_name.clone(),
                    page: format!("/api/pages/{page_id}"),
                    page_id,
                })
            })
            .collect::<ApiResult<Vec<_>>>()
    })
    .await?;
    Ok(Json(pages))
}

async fn get_page(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    Path(page_id): Path<String>,
) -> ApiResult<Response> {
    let session = session(&state, &headers)?;
    let bytes = session.page(&page_id)?.ok_or_else(|| ApiError::not_found(format!("unknown page `{page_id}`")))?;
    Ok(png(bytes))
}
