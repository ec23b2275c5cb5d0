//! HTTP/JSON service over the engine. Catalog, model and recognizer are
//! loaded once and shared read-only; corpus and job state sit behind locks.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use anyhow::Context;
use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use sword_core::corpus::{build_model, CooccurrenceModel, CorpusError, CorpusStore, Granularity, ReviewStatus};
use sword_core::iswa::{load_catalog, CatalogError, FilterState, GlyphId, RegionKind, Scope};
use sword_core::jobs::{JobError, JobKind, JobRecord, JobState, JobStore};
use sword_core::ogr::{apply_review, overlay, OgrConfig, RecognitionResult, Recognizer, ReviewEdit};
use sword_core::prediction::{suggest, suggestions_to_json, PredictionError};
use sword_core::raster::GrayImage;
use sword_core::swml::{parse_swml, serialize_swml, Sign, SignDocument, SignSource};
use sword_core::Catalog;

const MAX_UPLOAD: usize = 64 * 1024 * 1024;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub catalog: PathBuf,
    pub storage: PathBuf,
    /// Snapshot to serve predictions from; built from the stored corpus when
    /// absent.
    pub model: Option<PathBuf>,
    pub granularity: Granularity,
    pub k: usize,
    pub ogr: OgrConfig,
}

pub struct AppState {
    catalog: Arc<Catalog>,
    recognizer: Arc<Recognizer>,
    model: Option<Arc<CooccurrenceModel>>,
    granularity: Granularity,
    k: usize,
    storage: PathBuf,
    corpus: Mutex<CorpusStore>,
    jobs: Mutex<JobStore>,
    results: Mutex<HashMap<String, Arc<RecognitionResult>>>,
    reviews: Mutex<HashMap<String, Vec<String>>>,
}

impl AppState {
    pub fn load(config: &ServiceConfig) -> anyhow::Result<Self> {
        let catalog = load_catalog(&config.catalog).with_context(|| format!("loading catalog {}", config.catalog.display()))?;
        let model = match &config.model {
            Some(p) => {
                let mut f = std::fs::File::open(p).with_context(|| format!("opening model {}", p.display()))?;
                Some(CooccurrenceModel::load(&mut f).with_context(|| format!("loading model {}", p.display()))?)
            }
            None => None,
        };
        Self::new(catalog, model, config)
    }

    /// Builds the state around an already loaded catalog and model.
    pub fn new(catalog: Catalog, model: Option<CooccurrenceModel>, config: &ServiceConfig) -> anyhow::Result<Self> {
        for dir in ["documents", "jobs"] {
            std::fs::create_dir_all(config.storage.join(dir))
                .with_context(|| format!("storage dir {} is not writable", config.storage.display()))?;
        }
        let corpus = CorpusStore::open(&config.storage.join("corpus.jsonl"))?;
        let model = match model {
            Some(m) => Some(m),
            None if !corpus.is_empty() => Some(build_model(&corpus, config.granularity)),
            None => None,
        };
        let recognizer = Recognizer::new(&catalog, config.ogr.clone())?;
        Ok(Self {
            catalog: Arc::new(catalog),
            recognizer: Arc::new(recognizer),
            model: model.map(Arc::new),
            granularity: config.granularity,
            k: config.k,
            storage: config.storage.clone(),
            corpus: Mutex::new(corpus),
            jobs: Mutex::new(JobStore::new()),
            results: Mutex::new(HashMap::new()),
            reviews: Mutex::new(HashMap::new()),
        })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/catalog/categories", get(categories))
        .route("/catalog/regions", get(regions))
        .route("/catalog/glyphs", get(glyphs))
        .route("/catalog/glyphs/{code}/asset", get(asset))
        .route("/signs", post(post_sign).get(list_signs))
        .route("/documents/{id}", get(get_document).put(put_document))
        .route("/predict", post(predict))
        .route("/ogr/jobs", post(submit_job))
        .route("/ogr/jobs/{id}", get(get_job))
        .route("/ogr/jobs/{id}/review", post(post_review))
        .route("/corpus/stats", get(corpus_stats))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD))
        .with_state(state)
}

pub async fn serve(config: ServiceConfig, addr: SocketAddr) -> anyhow::Result<()> {
    let state = Arc::new(AppState::load(&config)?);
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        Self { status, kind, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad-request", message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not-found", message)
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": {"kind": self.kind, "message": self.message}}))).into_response()
    }
}

impl From<JobError> for ApiError {
    fn from(e: JobError) -> Self {
        match e {
            JobError::NotFound(_) => ApiError::not_found(e.to_string()),
            JobError::WrongState { .. } | JobError::ReviewBusy(_) | JobError::NoReview(_) => {
                ApiError::new(StatusCode::CONFLICT, "wrong-state", e.to_string())
            }
        }
    }
}

impl From<CatalogError> for ApiError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::UnknownScope(_) | CatalogError::UnknownRegion(_) => ApiError::not_found(e.to_string()),
            _ => ApiError::bad_request(e.to_string()),
        }
    }
}

impl From<CorpusError> for ApiError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { .. } => ApiError::internal(e),
            _ => ApiError::bad_request(e.to_string()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn parse_code(text: &str) -> ApiResult<GlyphId> {
    text.parse().map_err(|e: sword_core::iswa::CodeError| ApiError::bad_request(e.to_string()))
}

async fn categories(State(s): State<Arc<AppState>>) -> impl IntoResponse {
    Json(json!({ "categories": s.catalog.categories() }))
}

async fn regions(State(s): State<Arc<AppState>>) -> ApiResult<impl IntoResponse> {
    let mut out = Vec::new();
    for r in s.catalog.regions_for_puppet() {
        out.push(json!({
            "kind": r.kind,
            "body_part": r.kind.is_body_part(),
            "linked_scopes": r.linked_scopes,
            "choice_boxes": s.catalog.choice_boxes_for(r.kind)?,
        }));
    }
    Ok(Json(json!({ "regions": out })))
}

async fn glyphs(State(s): State<Arc<AppState>>, Query(q): Query<BTreeMap<String, String>>) -> ApiResult<impl IntoResponse> {
    let mut filters = q.clone();
    let region = filters.remove("region");
    let scope = filters.remove("scope");
    let list = match (region, scope) {
        (Some(_), Some(_)) => return Err(ApiError::bad_request("use either region or scope, not both")),
        (Some(region), None) => {
            let kind: RegionKind = region.parse().map_err(ApiError::bad_request)?;
            let mut state = FilterState::new();
            for (k, v) in &filters {
                state.choose(k.clone(), v.clone());
            }
            s.catalog.filter_glyphs(kind, &state)?
        }
        (None, scope) => {
            if !filters.is_empty() {
                return Err(ApiError::bad_request("attribute filters need a region"));
            }
            match scope {
                Some(text) => {
                    let scope: Scope = text.parse().map_err(ApiError::bad_request)?;
                    s.catalog.glyphs_in(scope)?
                }
                None => s.catalog.iter().collect(),
            }
        }
    };
    Ok(Json(json!({ "count": list.len(), "glyphs": list })))
}

async fn asset(State(s): State<Arc<AppState>>, UrlPath(code): UrlPath<String>) -> ApiResult<Response> {
    let id = parse_code(&code)?;
    let desc = s.catalog.get(&id).ok_or_else(|| ApiError::not_found(format!("glyph {id} is not in the catalog")))?;
    let png = desc.image.to_gray().encode_png().map_err(ApiError::internal)?;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

#[derive(Deserialize)]
struct SignUpload {
    #[serde(default)]
    sign: Option<Sign>,
    #[serde(default)]
    swml: Option<String>,
    #[serde(default)]
    provenance: Option<SignSource>,
    #[serde(default)]
    reviewed: bool,
}

async fn post_sign(State(s): State<Arc<AppState>>, Json(body): Json<SignUpload>) -> ApiResult<impl IntoResponse> {
    let status = if body.reviewed { ReviewStatus::Reviewed } else { ReviewStatus::Raw };
    let provenance = body.provenance.unwrap_or_default();
    let ids = match (body.sign, body.swml) {
        (Some(sign), None) => lock(&s.corpus).ingest(&s.catalog, &sign, provenance, status)?,
        (None, Some(text)) => {
            let doc = parse_swml(text.as_bytes()).map_err(|e| ApiError::bad_request(e.to_string()))?;
            lock(&s.corpus).ingest(&s.catalog, &doc, provenance, status)?
        }
        _ => return Err(ApiError::bad_request("send exactly one of `sign` or `swml`")),
    };
    Ok((StatusCode::CREATED, Json(json!({ "entry_ids": ids }))))
}

async fn list_signs(State(s): State<Arc<AppState>>) -> impl IntoResponse {
    let corpus = lock(&s.corpus);
    Json(json!({ "total_signs": corpus.total_signs(), "entries": corpus.entries() }))
}

fn document_path(storage: &Path, id: &str) -> ApiResult<PathBuf> {
    if id.is_empty() || id.len() > 128 || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(ApiError::bad_request("document ids use letters, digits, '-' and '_'"));
    }
    Ok(storage.join("documents").join(format!("{id}.swml")))
}

async fn get_document(State(s): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let path = document_path(&s.storage, &id)?;
    let bytes = std::fs::read(&path).map_err(|_| ApiError::not_found(format!("no document {id:?}")))?;
    Ok(([(header::CONTENT_TYPE, "application/xml")], bytes).into_response())
}

async fn put_document(State(s): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let path = document_path(&s.storage, &id)?;
    let doc = parse_swml(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let bytes = serialize_swml(&doc).map_err(|e| ApiError::bad_request(e.to_string()))?;
    std::fs::write(&path, bytes).map_err(ApiError::internal)?;
    Ok(Json(json!({
        "id": id,
        "signs": doc.sign_count(),
        "unknown_glyphs": unknown_glyphs(&s.catalog, &doc),
    })))
}

fn unknown_glyphs(catalog: &Catalog, doc: &SignDocument) -> Vec<String> {
    let mut out: Vec<GlyphId> = doc
        .signs()
        .flat_map(|s| s.placements.iter().map(|p| p.glyph))
        .filter(|g| !catalog.contains(g))
        .collect();
    out.sort();
    out.dedup();
    out.iter().map(ToString::to_string).collect()
}

#[derive(Deserialize)]
struct PredictRequest {
    #[serde(default)]
    placed: Vec<String>,
    #[serde(default)]
    k: Option<usize>,
}

async fn predict(State(s): State<Arc<AppState>>, Json(req): Json<PredictRequest>) -> ApiResult<Response> {
    let model = s
        .model
        .as_ref()
        .ok_or_else(|| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "no-model", "no co-occurrence model is loaded"))?;
    let placed = req.placed.iter().map(|c| parse_code(c)).collect::<ApiResult<Vec<_>>>()?;
    let ranked = suggest(&placed, model, req.k.unwrap_or(s.k)).map_err(|e| match e {
        PredictionError::EmptyModel => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "no-model", e.to_string()),
        PredictionError::InvalidK => ApiError::bad_request(e.to_string()),
    })?;
    Ok(([(header::CONTENT_TYPE, "application/json")], suggestions_to_json(&ranked)).into_response())
}

async fn corpus_stats(State(s): State<Arc<AppState>>, Query(q): Query<BTreeMap<String, String>>) -> ApiResult<impl IntoResponse> {
    let granularity = match q.get("granularity") {
        Some(g) => g.parse().map_err(ApiError::bad_request)?,
        None => s.granularity,
    };
    let corpus = lock(&s.corpus);
    let frequency: Vec<_> = corpus
        .stats_frequency(granularity)
        .into_iter()
        .map(|(g, n)| json!({"code": g.to_string(), "count": n}))
        .collect();
    Ok(Json(json!({
        "granularity": granularity,
        "entries": corpus.len(),
        "total_signs": corpus.total_signs(),
        "frequency": frequency,
    })))
}

fn job_dir(storage: &Path, id: &str) -> PathBuf {
    storage.join("jobs").join(id)
}

async fn submit_job(State(s): State<Arc<AppState>>, body: Bytes) -> ApiResult<impl IntoResponse> {
    if body.is_empty() {
        return Err(ApiError::bad_request("empty upload"));
    }
    let page = GrayImage::decode(&body).map_err(|e| ApiError::bad_request(format!("upload is not a readable image: {e}")))?;
    let id = lock(&s.jobs).submit(JobKind::Ogr);
    let dir = job_dir(&s.storage, &id);
    std::fs::create_dir_all(&dir).map_err(ApiError::internal)?;
    page.save_png(&dir.join("page.png")).map_err(ApiError::internal)?;
    lock(&s.jobs).add_artifact(&id, "page", format!("jobs/{id}/page.png"))?;
    let state = Arc::clone(&s);
    let job = id.clone();
    tokio::task::spawn_blocking(move || run_job(&state, &job, &page));
    Ok((StatusCode::ACCEPTED, Json(json!({ "job_id": id, "state": JobState::Queued }))))
}

fn run_job(s: &AppState, id: &str, page: &GrayImage) {
    if lock(&s.jobs).start(id).is_err() {
        return;
    }
    let outcome = s.recognizer.recognize(page).map_err(|e| e.to_string()).and_then(|result| {
        let dir = job_dir(&s.storage, id);
        let report = serde_json::to_vec_pretty(&result).map_err(|e| e.to_string())?;
        std::fs::write(dir.join("result.json"), report).map_err(|e| e.to_string())?;
        overlay(page, &result).save_png(&dir.join("overlay.png")).map_err(|e| e.to_string())?;
        Ok(result)
    });
    let mut jobs = lock(&s.jobs);
    match outcome {
        Ok(result) => {
            lock(&s.results).insert(id.to_string(), Arc::new(result));
            let _ = jobs.add_artifact(id, "result", format!("jobs/{id}/result.json"));
            let _ = jobs.add_artifact(id, "overlay", format!("jobs/{id}/overlay.png"));
            let _ = jobs.complete(id);
        }
        Err(e) => {
            let _ = jobs.fail(id, e);
        }
    }
}

#[derive(Serialize)]
struct JobView {
    #[serde(flatten)]
    record: JobRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Arc<RecognitionResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    warnings: Option<Vec<String>>,
}

async fn get_job(State(s): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<impl IntoResponse> {
    let record = lock(&s.jobs).get(&id)?.clone();
    let result = lock(&s.results).get(&id).cloned();
    let warnings = lock(&s.reviews).get(&id).cloned();
    Ok(Json(JobView { record, result, warnings }))
}

#[derive(Deserialize)]
struct ReviewRequest {
    #[serde(default)]
    edits: Vec<ReviewEdit>,
    /// Also add the finalized signs to the corpus.
    #[serde(default)]
    ingest: bool,
}

async fn post_review(
    State(s): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Json(req): Json<ReviewRequest>,
) -> ApiResult<impl IntoResponse> {
    lock(&s.jobs).begin_review(&id)?;
    match finish_review(&s, &id, &req) {
        Ok(body) => {
            lock(&s.jobs).finalize(&id)?;
            Ok(Json(body))
        }
        Err(e) => {
            let _ = lock(&s.jobs).abandon_review(&id);
            Err(e)
        }
    }
}

fn finish_review(s: &AppState, id: &str, req: &ReviewRequest) -> ApiResult<serde_json::Value> {
    let result = lock(&s.results)
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::internal(format!("job {id} lost its recognition result")))?;
    let outcome = apply_review(&result, &req.edits).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let mut doc = outcome.document;
    doc.meta.title = Some(format!("recognized page {id}"));
    let bytes = serialize_swml(&doc).map_err(ApiError::internal)?;
    if req.ingest && doc.sign_count() > 0 {
        lock(&s.corpus).ingest(&s.catalog, &doc, SignSource::Ogr, ReviewStatus::Reviewed)?;
    }
    let path = document_path(&s.storage, id)?;
    std::fs::write(&path, &bytes).map_err(ApiError::internal)?;
    std::fs::write(job_dir(&s.storage, id).join("document.swml"), &bytes).map_err(ApiError::internal)?;
    let mut jobs = lock(&s.jobs);
    jobs.add_artifact(id, "document", format!("documents/{id}.swml"))?;
    lock(&s.reviews).insert(id.to_string(), outcome.warnings.clone());
    Ok(json!({
        "job_id": id,
        "document_id": id,
        "swml": String::from_utf8(bytes).map_err(ApiError::internal)?,
        "warnings": outcome.warnings,
    }))
}
