//! Read-only HTTP API over mapper graphs prebuilt by the `actmap` CLI.
//!
//! Every response body is a JSON object with a `params` entry describing
//! how the served graph was built and what was asked for. Errors are
//! `{"error": message, "params": ...}` with a matching status code.

pub mod state;

use std::collections::BTreeMap;
use std::sync::Arc;

use actmap::io::to_canonical_json;
use actmap::nerve::{filter_edges, node_detail, Params};
use actmap::pca::{pca_refine, NodeGroup};
use actmap::Error;
use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::cors::{Any, CorsLayer};

pub use state::{load_data_dir, AppState, ServedDataset, ServedLayer};

type Shared = Arc<AppState>;
type Args = Query<BTreeMap<String, String>>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    request: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>, request: &Value) -> Self {
        ApiError {
            status,
            message: message.into(),
            request: request.clone(),
        }
    }

    fn from_core(err: Error, request: &Value) -> Self {
        let status = match err {
            Error::Param(_) => StatusCode::BAD_REQUEST,
            Error::NotFound(_) => StatusCode::NOT_FOUND,
            Error::Degenerate(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, err.to_string(), request)
    }
}

fn json_response(status: StatusCode, body: &Value) -> Response {
    let text = to_canonical_json(body).unwrap_or_else(|_| r#"{"error":"serialization failed"}"#.into());
    (status, [(header::CONTENT_TYPE, "application/json")], text).into_response()
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self.message, "params": { "request": self.request } });
        json_response(self.status, &body)
    }
}

type ApiResult = Result<Response, ApiError>;

fn request_value(args: &BTreeMap<String, String>) -> Value {
    json!(args)
}

fn required<'a>(args: &'a BTreeMap<String, String>, key: &str, req: &Value) -> Result<&'a str, ApiError> {
    args.get(key)
        .map(String::as_str)
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, format!("missing query parameter {key:?}"), req))
}

fn find_dataset<'a>(state: &'a AppState, name: &str, req: &Value) -> Result<&'a ServedDataset, ApiError> {
    state
        .dataset(name)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown dataset {name:?}"), req))
}

fn find_layer<'a>(dataset: &'a ServedDataset, name: &str, req: &Value) -> Result<&'a ServedLayer, ApiError> {
    dataset.layer(name).ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_FOUND,
            format!("unknown layer {name:?} in dataset {:?}", dataset.name()),
            req,
        )
    })
}

fn lookup<'a>(state: &'a AppState, args: &BTreeMap<String, String>, req: &Value) -> Result<&'a ServedLayer, ApiError> {
    let dataset = find_dataset(state, required(args, "dataset", req)?, req)?;
    find_layer(dataset, required(args, "layer", req)?, req)
}

/// The graph's build provenance plus the request that produced a response.
fn provenance(layer: &ServedLayer, req: &Value) -> Value {
    let mut p: Params = layer.graph.params.clone();
    p.insert("request".into(), req.clone());
    Value::Object(p)
}

fn parse_flag(args: &BTreeMap<String, String>, key: &str, req: &Value) -> Result<bool, ApiError> {
    match args.get(key).map(String::as_str) {
        None | Some("false") | Some("0") => Ok(false),
        Some("true") | Some("1") | Some("") => Ok(true),
        Some(other) => Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            format!("{key} must be true or false, got {other:?}"),
            req,
        )),
    }
}

async fn datasets(State(state): State<Shared>) -> Response {
    let list: Vec<Value> = state
        .datasets
        .iter()
        .map(|d| json!({ "name": d.name(), "layers": d.layers.iter().map(|l| &l.name).collect::<Vec<_>>() }))
        .collect();
    json_response(
        StatusCode::OK,
        &json!({ "datasets": list, "params": { "request": {}, "serve_matrices": state.serve_matrices } }),
    )
}

async fn graph(State(state): State<Shared>, Query(args): Args) -> ApiResult {
    let req = request_value(&args);
    let layer = lookup(&state, &args, &req)?;
    let min_jaccard = match args.get("min_jaccard") {
        None => 0.0,
        Some(s) => s.parse::<f64>().map_err(|_| {
            ApiError::new(StatusCode::BAD_REQUEST, format!("min_jaccard must be a number, got {s:?}"), &req)
        })?,
    };
    let members = parse_flag(&args, "members", &req)?;
    let filtered = filter_edges(&layer.graph, min_jaccard).map_err(|e| ApiError::from_core(e, &req))?;
    let mut body = serde_json::to_value(&filtered).map_err(|e| ApiError::from_core(e.into(), &req))?;
    if !members {
        for node in body["nodes"].as_array_mut().into_iter().flatten() {
            node.as_object_mut().map(|n| n.remove("members"));
        }
    }
    body["params"] = provenance(layer, &req);
    Ok(json_response(StatusCode::OK, &body))
}

async fn node(State(state): State<Shared>, Query(args): Args) -> ApiResult {
    let req = request_value(&args);
    let layer = lookup(&state, &args, &req)?;
    let raw = required(&args, "id", &req)?;
    let id: usize = raw
        .parse()
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, format!("node id must be an integer, got {raw:?}"), &req))?;
    let detail = node_detail(&layer.graph, id, layer.metadata.as_ref()).map_err(|e| ApiError::from_core(e, &req))?;
    let mut body = serde_json::to_value(&detail).map_err(|e| ApiError::from_core(e.into(), &req))?;
    body["params"] = provenance(layer, &req);
    Ok(json_response(StatusCode::OK, &body))
}

/// Node ids whose top classes include any of `classes`.
fn matching_nodes(layer: &ServedLayer, classes: &[&str]) -> Vec<usize> {
    layer
        .graph
        .nodes
        .iter()
        .filter(|n| n.top_classes.iter().any(|t| classes.contains(&t.label.as_str())))
        .map(|n| n.id)
        .collect()
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

async fn search(State(state): State<Shared>, Query(args): Args) -> ApiResult {
    let req = request_value(&args);
    let dataset = find_dataset(&state, required(&args, "dataset", &req)?, &req)?;
    let classes = split_list(required(&args, "classes", &req)?);
    if let Some(layers) = args.get("layers") {
        let mut results = Vec::new();
        for name in split_list(layers) {
            let layer = find_layer(dataset, name, &req)?;
            results.push(json!({ "layer": name, "nodes": matching_nodes(layer, &classes) }));
        }
        let body = json!({ "layers": results, "params": { "request": req, "dataset": dataset.name() } });
        return Ok(json_response(StatusCode::OK, &body));
    }
    let layer = find_layer(dataset, required(&args, "layer", &req)?, &req)?;
    let body = json!({ "nodes": matching_nodes(layer, &classes), "params": provenance(layer, &req) });
    Ok(json_response(StatusCode::OK, &body))
}

#[derive(Deserialize)]
struct PcaRequest {
    dataset: String,
    layer: String,
    node_ids: Vec<usize>,
    #[serde(default)]
    groups: Option<Vec<NodeGroup>>,
}

async fn pca(State(state): State<Shared>, body: Bytes) -> ApiResult {
    let req: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
    let parsed: PcaRequest = serde_json::from_value(req.clone())
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid request body: {e}"), &req))?;
    if parsed.node_ids.is_empty() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "node_ids is empty", &req));
    }
    let dataset = find_dataset(&state, &parsed.dataset, &req)?;
    find_layer(dataset, &parsed.layer, &req)?;
    if !state.serve_matrices {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "this server was started without matrices; projections are unavailable",
            &req,
        ));
    }
    let task_state = Arc::clone(&state);
    let task_req = req.clone();
    tokio::task::spawn_blocking(move || {
        let layer = task_state
            .dataset(&parsed.dataset)
            .and_then(|d| d.layer(&parsed.layer))
            .expect("checked above");
        let cloud = layer.cloud.as_ref().expect("matrices are served");
        let proj = pca_refine(cloud, &layer.graph, &parsed.node_ids, parsed.groups.as_deref())
            .map_err(|e| ApiError::from_core(e, &task_req))?;
        let mut body = serde_json::to_value(&proj).map_err(|e| ApiError::from_core(e.into(), &task_req))?;
        body["params"] = provenance(layer, &task_req);
        Ok(json_response(StatusCode::OK, &body))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string(), &req))?
}

pub fn router(state: AppState) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/datasets", get(datasets))
        .route("/graph", get(graph))
        .route("/node", get(node))
        .route("/search", get(search))
        .route("/pca", post(pca))
        .layer(cors)
        .with_state(Arc::new(state))
}
