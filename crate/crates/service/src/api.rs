//! Routes under `/api/v1`. Each handler decodes its request, calls one core
//! operation against the shared store and serializes the result.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, Request, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post, put};
use axum::{Json, Router};
use comptrack_core::portability::{import_decoded, Archive, ARCHIVE_CONTENT_TYPE, MAX_ENTRY_BYTES};
use comptrack_core::reporting::Tabular;
use comptrack_core::{
    export_archive, export_dossier, export_report, gap_analysis, grader_report, import_outcomes_csv,
    level_checklist, parse_level, user_report, CompetencyKind, CourseDraft, Error, ImportDestination,
    ImportScope, PlacementTable, ReportFormat, Score, SharedStore, Store, Student,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::ApiError;

type ApiResult<T> = Result<T, ApiError>;

/// Deployment knobs that shape responses.
#[derive(Debug, Clone)]
pub struct Settings {
    pub placement: Option<PlacementTable>,
    pub checklist_threshold: Score,
    /// When set, every endpoint except `/health` requires `Authorization: Bearer <token>`.
    pub token: Option<String>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            placement: None,
            checklist_threshold: Score::new(4).expect("4 is on the scale"),
            token: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    store: SharedStore,
    settings: Settings,
}

impl AppState {
    pub fn new(store: SharedStore, settings: Settings) -> Self {
        AppState {
            inner: Arc::new(Inner { store, settings }),
        }
    }

    pub fn store(&self) -> &SharedStore {
        &self.inner.store
    }

    pub fn settings(&self) -> &Settings {
        &self.inner.settings
    }

    fn snapshot(&self) -> Arc<Store> {
        self.inner.store.snapshot()
    }

    /// Runs a mutation off the async workers; the store persists before
    /// publishing, which touches the disk.
    async fn write<T, F>(&self, f: F) -> ApiResult<T>
    where
        T: Send + 'static,
        F: FnOnce(&mut Store) -> comptrack_core::Result<T> + Send + 'static,
    {
        let state = self.clone();
        tokio::task::spawn_blocking(move || state.inner.store.mutate(f))
            .await
            .map_err(|e| ApiError::internal(e.to_string()))?
            .map_err(ApiError::from)
    }
}

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/health", get(health))
        .route("/outcomes/import", post(import_outcomes))
        .route("/competencies", get(list_competencies))
        .route("/students", post(add_student).get(list_students))
        .route("/students/{sid}", get(get_student))
        .route("/students/{sid}/checklist/{level}", get(checklist))
        .route("/courses", post(create_course).get(list_courses))
        .route("/courses/{id}", get(get_course).patch(rename_course))
        .route("/courses/{id}/enroll", post(enroll))
        .route("/courses/{id}/enroll/{sid}", delete(unenroll))
        .route("/courses/{id}/grader-report", get(grader))
        .route("/courses/{id}/students/{sid}/user-report", get(user))
        .route("/courses/{id}/gaps/{competency}", get(gaps))
        .route("/courses/{id}/export", get(export_course))
        .route("/courses/{id}/export/{sid}", get(export_student))
        .route("/grades", put(record_grade))
        .route("/placement", post(place))
        .route("/import", post(import))
        .layer(middleware::from_fn_with_state(state.clone(), require_token))
        .layer(DefaultBodyLimit::max(MAX_ENTRY_BYTES as usize))
        .with_state(state);
    Router::new()
        .nest("/api/v1", api)
        .fallback(|| async { ApiError::route_not_found() })
}

async fn require_token(State(state): State<AppState>, req: Request, next: Next) -> Response {
    let Some(token) = state.settings().token.as_deref() else {
        return next.run(req).await;
    };
    if req.uri().path().ends_with("/health") {
        return next.run(req).await;
    }
    let presented = req
        .headers()
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "));
    if presented == Some(token) {
        next.run(req).await
    } else {
        ApiError::unauthorized().into_response()
    }
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Invalid(format!("request body: {e}")).into())
}

fn attachment(content_type: &str, file_name: &str, bytes: Vec<u8>) -> Response {
    let disposition = format!("attachment; filename=\"{file_name}\"");
    let mut res = bytes.into_response();
    let h = res.headers_mut();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_str(content_type).expect("static type"));
    if let Ok(v) = HeaderValue::from_str(&disposition) {
        h.insert(header::CONTENT_DISPOSITION, v);
    }
    res
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub competencies: usize,
    pub students: usize,
    pub courses: usize,
    pub assessments: usize,
}

async fn health(State(state): State<AppState>) -> Json<Health> {
    let s = state.snapshot();
    Json(Health {
        status: "ok".into(),
        competencies: s.taxonomy().len(),
        students: s.students().len(),
        courses: s.courses().count(),
        assessments: s.assessments().len(),
    })
}

#[derive(Debug, Deserialize)]
struct OutcomesQuery {
    scope: Option<String>,
    course: Option<String>,
}

async fn import_outcomes(
    State(state): State<AppState>,
    Query(q): Query<OutcomesQuery>,
    csv: Bytes,
) -> ApiResult<impl IntoResponse> {
    let scope = match (q.scope.as_deref().unwrap_or("standard"), q.course) {
        ("standard", None) => ImportScope::Standard,
        ("custom", Some(course)) => ImportScope::Custom(course),
        ("standard", Some(_)) => return Err(Error::Invalid("course is only meaningful with scope=custom".into()).into()),
        ("custom", None) => return Err(Error::Invalid("scope=custom needs course".into()).into()),
        (other, _) => return Err(Error::Invalid(format!("unknown scope {other:?}")).into()),
    };
    let added = state
        .write(move |s| import_outcomes_csv(s, &csv, &scope))
        .await?;
    Ok(Json(json!({ "added": added.len(), "competencies": added })))
}

#[derive(Debug, Deserialize)]
struct CompetencyQuery {
    level: Option<String>,
    kind: Option<String>,
}

async fn list_competencies(
    State(state): State<AppState>,
    Query(q): Query<CompetencyQuery>,
) -> ApiResult<impl IntoResponse> {
    let level = q.level.as_deref().map(parse_level).transpose()?;
    let kind = q.kind.as_deref().map(str::parse::<CompetencyKind>).transpose()?;
    let s = state.snapshot();
    let items: Vec<_> = s
        .taxonomy()
        .iter()
        .filter(|c| level.is_none_or(|l| c.level == l))
        .filter(|c| kind.is_none_or(|k| c.kind == k))
        .cloned()
        .collect();
    Ok(Json(items))
}

async fn add_student(State(state): State<AppState>, raw: Bytes) -> ApiResult<impl IntoResponse> {
    let student: Student = body(&raw)?;
    let created = state.write(move |s| s.add_student(student).cloned()).await?;
    Ok((StatusCode::CREATED, Json(created)))
}

async fn list_students(State(state): State<AppState>) -> Json<Vec<Student>> {
    Json(state.snapshot().students().into_iter().cloned().collect())
}

async fn get_student(State(state): State<AppState>, Path(sid): Path<String>) -> ApiResult<Json<Student>> {
    Ok(Json(state.snapshot().student(&sid)?.clone()))
}

async fn create_course(State(state): State<AppState>, raw: Bytes) -> ApiResult<impl IntoResponse> {
    let draft: CourseDraft = body(&raw)?;
    let created = state.write(move |s| s.create_course(draft).cloned()).await?;
    Ok((StatusCode::CREATED, Json(created)))
}

async fn list_courses(State(state): State<AppState>) -> impl IntoResponse {
    let s = state.snapshot();
    Json(s.courses().cloned().collect::<Vec<_>>())
}

async fn get_course(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(state.snapshot().course(&id)?.clone()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Rename {
    full_name: Option<String>,
    short_name: Option<String>,
}

async fn rename_course(
    State(state): State<AppState>,
    Path(id): Path<String>,
    raw: Bytes,
) -> ApiResult<impl IntoResponse> {
    let req: Rename = body(&raw)?;
    let course = state
        .write(move |s| {
            let current = s.course(&id)?;
            let full = req.full_name.unwrap_or_else(|| current.full_name.clone());
            let short = req.short_name.unwrap_or_else(|| current.short_name.clone());
            s.rename_course(&id, &full, &short)?;
            Ok(s.course(&id)?.clone())
        })
        .await?;
    Ok(Json(course))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Enroll {
    student: String,
}

async fn enroll(
    State(state): State<AppState>,
    Path(id): Path<String>,
    raw: Bytes,
) -> ApiResult<impl IntoResponse> {
    let req: Enroll = body(&raw)?;
    let course = state
        .write(move |s| {
            s.enroll(&id, &req.student)?;
            Ok(s.course(&id)?.clone())
        })
        .await?;
    Ok(Json(course))
}

async fn unenroll(
    State(state): State<AppState>,
    Path((id, sid)): Path<(String, String)>,
) -> ApiResult<impl IntoResponse> {
    let course = state
        .write(move |s| {
            s.unenroll(&id, &sid)?;
            Ok(s.course(&id)?.clone())
        })
        .await?;
    Ok(Json(course))
}

/// Score arrives as a plain integer so an off-scale value is reported with
/// the domain code rather than a decoding error.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Grade {
    student: String,
    competency: String,
    score: i64,
    #[serde(default)]
    feedback: Option<String>,
    #[serde(default)]
    assessor: Option<String>,
}

async fn record_grade(State(state): State<AppState>, raw: Bytes) -> ApiResult<impl IntoResponse> {
    let req: Grade = body(&raw)?;
    let score = Score::new(req.score)?;
    let assessor = req.assessor.unwrap_or_else(|| "api".to_string());
    let (assessment, rating, history) = state
        .write(move |s| {
            let a = s.record_assessment(&req.student, &req.competency, score, req.feedback, &assessor)?;
            let rating = s.current_rating(&req.student, &req.competency)?;
            let history = s.history(&req.student, &req.competency).len();
            Ok((a, rating, history))
        })
        .await?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "assessment": assessment, "current_rating": rating, "history_length": history })),
    ))
}

#[derive(Debug, Deserialize)]
struct FormatQuery {
    format: Option<String>,
}

impl FormatQuery {
    /// `None` means JSON.
    fn tabular(&self) -> ApiResult<Option<ReportFormat>> {
        match self.format.as_deref() {
            None | Some("json") => Ok(None),
            Some(f) => Ok(Some(f.parse()?)),
        }
    }
}

fn tabular_response<T: Tabular + Serialize>(report: &T, format: Option<ReportFormat>, stem: &str) -> ApiResult<Response> {
    match format {
        None => Ok(Json(report).into_response()),
        Some(f) => {
            let bytes = export_report(report, f)?;
            Ok(attachment(f.content_type(), &format!("{stem}.{}", f.extension()), bytes))
        }
    }
}

async fn grader(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<FormatQuery>,
) -> ApiResult<Response> {
    let format = q.tabular()?;
    let report = grader_report(&state.snapshot(), &id)?;
    tabular_response(&report, format, &format!("{id}-grader"))
}

async fn user(
    State(state): State<AppState>,
    Path((id, sid)): Path<(String, String)>,
    Query(q): Query<FormatQuery>,
) -> ApiResult<Response> {
    let format = q.tabular()?;
    let report = user_report(&state.snapshot(), &sid, &id)?;
    tabular_response(&report, format, &format!("{id}-{sid}-user"))
}

async fn gaps(
    State(state): State<AppState>,
    Path((id, competency)): Path<(String, String)>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(gap_analysis(&state.snapshot(), &id, &competency)?))
}

#[derive(Debug, Deserialize)]
struct ThresholdQuery {
    threshold: Option<i64>,
}

async fn checklist(
    State(state): State<AppState>,
    Path((sid, level)): Path<(String, String)>,
    Query(q): Query<ThresholdQuery>,
) -> ApiResult<impl IntoResponse> {
    let level = parse_level(&level)?;
    let threshold = match q.threshold {
        Some(t) => Score::new(t)?,
        None => state.settings().checklist_threshold,
    };
    Ok(Json(level_checklist(&state.snapshot(), &sid, level, threshold)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Placement {
    test: String,
    score: f64,
}

async fn place(State(state): State<AppState>, raw: Bytes) -> ApiResult<impl IntoResponse> {
    let req: Placement = body(&raw)?;
    let table = state.settings().placement.as_ref().ok_or(Error::PlacementNotConfigured)?;
    let level = table.place(&req.test, req.score)?;
    Ok(Json(json!({ "test": req.test, "score": req.score, "level": level })))
}

fn archive_response(archive: &Archive) -> ApiResult<Response> {
    let bytes = archive.to_bytes()?;
    Ok(attachment(ARCHIVE_CONTENT_TYPE, &archive.file_name(), bytes))
}

async fn export_course(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    archive_response(&export_archive(&state.snapshot(), &id)?)
}

async fn export_student(
    State(state): State<AppState>,
    Path((id, sid)): Path<(String, String)>,
) -> ApiResult<Response> {
    archive_response(&export_dossier(&state.snapshot(), &id, &sid)?)
}

/// Multipart form with a `file` part (the archive) and a `destination` part
/// (`new`, `new:<name>`, `merge:<course>` or `replace:<course>`).
async fn import(State(state): State<AppState>, mut form: Multipart) -> ApiResult<impl IntoResponse> {
    let bad = |e: axum::extract::multipart::MultipartError| ApiError::from(Error::Invalid(format!("multipart: {e}")));
    let mut file = None;
    let mut destination = None;
    while let Some(field) = form.next_field().await.map_err(bad)? {
        match field.name() {
            Some("file") => file = Some(field.bytes().await.map_err(bad)?),
            Some("destination") => destination = Some(field.text().await.map_err(bad)?),
            _ => {}
        }
    }
    let file = file.ok_or_else(|| Error::Invalid("multipart form lacks a file part".into()))?;
    let dest: ImportDestination = destination
        .ok_or_else(|| Error::Invalid("multipart form lacks a destination part".into()))?
        .trim()
        .parse()?;
    let archive = Archive::from_bytes(&file)?;
    let outcome = state.write(move |s| import_decoded(s, &archive, &dest)).await?;
    Ok(Json(outcome))
}
