use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use comptrack_core::{Error, ErrorKind};
use serde::Serialize;
use serde_json::{json, Value};

/// Body of every failed request: a stable machine code, a human message and
/// an optional map of structured detail.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
            detail: None,
        }
    }

    pub fn unauthorized() -> Self {
        ApiError::new(
            StatusCode::UNAUTHORIZED,
            "auth.unauthorized",
            "missing or wrong bearer token",
        )
    }

    pub fn route_not_found() -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "route.not_found", "no such endpoint")
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

pub fn status_for(kind: ErrorKind) -> StatusCode {
    match kind {
        ErrorKind::Invalid => StatusCode::BAD_REQUEST,
        ErrorKind::NotFound => StatusCode::NOT_FOUND,
        ErrorKind::Conflict => StatusCode::CONFLICT,
        ErrorKind::Unprocessable => StatusCode::UNPROCESSABLE_ENTITY,
        ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

fn detail_of(e: &Error) -> Option<Value> {
    Some(match e {
        Error::ScoreOutOfRange(v) => json!({ "score": v }),
        Error::PlacementScoreOutOfRange(v) => json!({ "score": v }),
        Error::UnknownLevel(v) | Error::EmptyLevel(v) => json!({ "level": v }),
        Error::UnknownTest(v) => json!({ "test": v }),
        Error::UnknownStudent(v) | Error::DuplicateStudent(v) => json!({ "student": v }),
        Error::UnknownCompetency(v) | Error::DuplicateSlugConflict(v) => json!({ "competency": v }),
        Error::UnknownCourse(v) | Error::DuplicateCourse(v) => json!({ "course": v }),
        Error::DuplicateShortName(v) => json!({ "short_name": v }),
        Error::StudentNotEnrolled { student, context } => json!({ "student": student, "context": context }),
        Error::CompetencyNotInCourse { course, competency } => {
            json!({ "course": course, "competency": competency })
        }
        Error::MalformedCsv { line, .. } => json!({ "line": line }),
        Error::UnsupportedVersion(v) => json!({ "version": v }),
        Error::LevelMismatch { archive, course } => json!({ "archive_level": archive, "course_level": course }),
        Error::IdentityConflict { email, .. } => json!({ "email": email }),
        _ => return None,
    })
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError {
            status: status_for(e.kind()),
            code: e.code().to_string(),
            message: e.to_string(),
            detail: detail_of(&e),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = %self.code, "{}", self.message);
        }
        (self.status, Json(&self)).into_response()
    }
}
