//! HTTP API over a read-only workspace.
//!
//! Every handler parses query parameters, calls one library function and
//! serializes its result. Failures are JSON `{"error", "message"}` bodies:
//! 404 for unknown datasets or countries, 400 for anything else the caller
//! got wrong.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use chorimap_core::colorlab::study_palette;
use chorimap_core::query::{ClusterRelation, DistributionMode, FrequencyRelation, Granularity, QueryEngine};
use chorimap_core::render::class_view;
use chorimap_core::symbolize::{class_styles, css_stylesheet};
use chorimap_core::{
    render_map, AngleScheme, Error, GeoJsonOptions, MapType, RenderOptions, RenderRequest, StyleOptions, Viewport,
    Workspace,
};
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 600;
pub const MAX_SIDE: u32 = 8192;
/// Fraction of the feature extent left around fitted maps.
pub const FIT_MARGIN: f64 = 0.03;

#[derive(Clone)]
pub struct AppState {
    ws: Arc<Workspace>,
    default_classes: usize,
    geometry: Arc<String>,
}

impl AppState {
    pub fn new(ws: Workspace, default_classes: usize) -> Result<Self, Error> {
        let geometry = serde_json::to_string(&ws.geometry_with_anchors(&GeoJsonOptions::default())?)
            .expect("geometry serializes");
        Ok(Self { ws: Arc::new(ws), default_classes, geometry: Arc::new(geometry) })
    }

    pub fn workspace(&self) -> &Workspace {
        &self.ws
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn bad(code: &'static str, message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, code, message: message.into() }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match &e {
            Error::NotFound { .. } => (StatusCode::NOT_FOUND, "not_found"),
            Error::EmptyYear(_) => (StatusCode::BAD_REQUEST, "empty_year"),
            Error::ReferenceHasNoData(_) => (StatusCode::BAD_REQUEST, "reference_has_no_data"),
            Error::MissingEndpoint { .. } => (StatusCode::BAD_REQUEST, "missing_endpoint"),
            Error::InvalidArgument(_) => (StatusCode::BAD_REQUEST, "invalid_argument"),
            Error::Validation(_) | Error::InvalidFeatures { .. } | Error::NonNumeric { .. } => {
                (StatusCode::BAD_REQUEST, "validation")
            }
            Error::Parse { .. } => (StatusCode::BAD_REQUEST, "parse"),
            Error::DegeneratePolygon => (StatusCode::BAD_REQUEST, "degenerate_polygon"),
            Error::Png(_) | Error::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        Self { status, code, message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::to_string(&ErrorBody { error: self.code, message: self.message })
            .expect("error body serializes");
        (self.status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn json<T: Serialize>(value: &T) -> ApiResult {
    let body = serde_json::to_string(value).expect("response serializes");
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, ApiError>
    where
        T::Err: Display,
    {
        self.0
            .get(key)
            .map(|raw| {
                raw.parse::<T>()
                    .map_err(|e| ApiError::bad("bad_parameter", format!("parameter '{key}': {e}")))
            })
            .transpose()
    }

    fn req<T: FromStr>(&self, key: &str) -> Result<T, ApiError>
    where
        T::Err: Display,
    {
        self.opt(key)?
            .ok_or_else(|| ApiError::bad("missing_parameter", format!("missing parameter '{key}'")))
    }

    fn text(&self, key: &str) -> Result<&str, ApiError> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| ApiError::bad("missing_parameter", format!("missing parameter '{key}'")))
    }

    fn flag(&self, key: &str) -> Result<bool, ApiError> {
        match self.0.get(key).map(String::as_str) {
            None | Some("0") | Some("false") => Ok(false),
            Some("") | Some("1") | Some("true") => Ok(true),
            Some(other) => Err(ApiError::bad("bad_parameter", format!("parameter '{key}': expected a boolean, got '{other}'"))),
        }
    }
}

fn classes(state: &AppState, p: &Params) -> Result<usize, ApiError> {
    Ok(p.opt("k")?.unwrap_or(state.default_classes))
}

fn render_request(state: &AppState, p: &Params) -> Result<RenderRequest, ApiError> {
    let width = p.opt("width")?.unwrap_or(DEFAULT_WIDTH);
    let height = p.opt("height")?.unwrap_or(DEFAULT_HEIGHT);
    if !(1..=MAX_SIDE).contains(&width) || !(1..=MAX_SIDE).contains(&height) {
        return Err(ApiError::bad("bad_parameter", format!("width and height must be within 1-{MAX_SIDE}")));
    }
    Ok(RenderRequest {
        dataset: p.text("dataset")?.to_owned(),
        year: p.req("year")?,
        map_type: p.opt("type")?.unwrap_or(MapType::Choropleth),
        viewport: Viewport::fit(state.ws.features(), width, height, FIT_MARGIN)?,
        options: RenderOptions {
            legend: p.flag("legend")?,
            popup_for: p.opt("popup")?,
            classes: classes(state, p)?,
            ..RenderOptions::default()
        },
    })
}

fn engine<'a>(state: &'a AppState, p: &Params) -> Result<QueryEngine<'a>, ApiError> {
    let mut q = QueryEngine::for_workspace(&state.ws, p.text("dataset")?)?
        .with_classes(classes(state, p)?)
        .with_granularity(p.opt("granularity")?.unwrap_or(Granularity::Class));
    if let Some(eps) = p.opt("epsilon")? {
        q = q.with_epsilon(eps);
    }
    Ok(q)
}

async fn datasets(State(state): State<AppState>) -> ApiResult {
    json(&state.ws.dataset_infos())
}

async fn geometry(State(state): State<AppState>) -> Response {
    ([(header::CONTENT_TYPE, "application/geo+json")], state.geometry.as_str().to_owned()).into_response()
}

async fn classify(State(state): State<AppState>, Query(q): Query<BTreeMap<String, String>>) -> ApiResult {
    let p = Params(q);
    json(&class_view(&state.ws, &render_request(&state, &p)?)?)
}

async fn render(State(state): State<AppState>, Query(q): Query<BTreeMap<String, String>>) -> ApiResult {
    let p = Params(q);
    let doc = render_map(&state.ws, &render_request(&state, &p)?)?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], doc.bytes).into_response())
}

async fn clusters(State(state): State<AppState>, Query(q): Query<BTreeMap<String, String>>) -> ApiResult {
    let p = Params(q);
    let rel: ClusterRelation = p.opt("relation")?.unwrap_or(ClusterRelation::Same);
    json(&engine(&state, &p)?.clusters(p.req("year")?, p.text("country")?, rel)?)
}

async fn frequency(State(state): State<AppState>, Query(q): Query<BTreeMap<String, String>>) -> ApiResult {
    let p = Params(q);
    let rel: FrequencyRelation = p.opt("relation")?.unwrap_or(FrequencyRelation::Same);
    json(&engine(&state, &p)?.frequency(p.req("year")?, p.text("country")?, rel)?)
}

async fn trend(State(state): State<AppState>, Query(q): Query<BTreeMap<String, String>>) -> ApiResult {
    let p = Params(q);
    let r = engine(&state, &p)?.trend(p.text("country")?, p.req("from")?, p.req("to")?)?;
    json(&r.trend().expect("trend payload"))
}

async fn distribution(State(state): State<AppState>, Query(q): Query<BTreeMap<String, String>>) -> ApiResult {
    let p = Params(q);
    let mode: DistributionMode = p.opt("mode")?.unwrap_or(DistributionMode::Same);
    json(&engine(&state, &p)?.distribution(p.text("a")?, p.text("b")?, p.req("from")?, p.req("to")?, mode)?)
}

async fn pattern_css(State(state): State<AppState>, Query(q): Query<BTreeMap<String, String>>) -> ApiResult {
    let p = Params(q);
    let k = classes(&state, &p)?;
    let scheme: AngleScheme = p.opt("scheme")?.unwrap_or(state.ws.style().scheme);
    let style = StyleOptions { scheme, ..state.ws.style().clone() };
    let css = css_stylesheet(&class_styles(&study_palette(k)?, &style)?);
    Ok(([(header::CONTENT_TYPE, "text/css; charset=utf-8")], css).into_response())
}

async fn fallback() -> ApiError {
    ApiError { status: StatusCode::NOT_FOUND, code: "not_found", message: "no such endpoint".into() }
}

fn cors(origin: &str) -> Result<CorsLayer, String> {
    let allow = if origin == "*" {
        AllowOrigin::any()
    } else {
        AllowOrigin::exact(HeaderValue::from_str(origin).map_err(|e| format!("CORS origin '{origin}': {e}"))?)
    };
    Ok(CorsLayer::new().allow_origin(allow).allow_methods([axum::http::Method::GET]))
}

/// Router for the API, with CORS for `cors_origin` when given.
pub fn router(state: AppState, cors_origin: Option<&str>) -> Result<Router, String> {
    let app = Router::new()
        .route("/api/datasets", get(datasets))
        .route("/api/geometry", get(geometry))
        .route("/api/classify", get(classify))
        .route("/api/render", get(render))
        .route("/api/query/clusters", get(clusters))
        .route("/api/query/frequency", get(frequency))
        .route("/api/query/trend", get(trend))
        .route("/api/query/distribution", get(distribution))
        .route("/api/pattern.css", get(pattern_css))
        .fallback(fallback)
        .with_state(state);
    Ok(match cors_origin {
        Some(origin) => app.layer(cors(origin)?),
        None => app,
    })
}
