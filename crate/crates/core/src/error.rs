use thiserror::Error;

/// Every failure the tracking core can report.
///
/// Each variant carries a stable machine code (see [`Error::code`]) that the
/// HTTP service and the CLI surface verbatim. Codes are part of the v1 API and
/// must not be renamed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown CEFR level {0:?}")]
    UnknownLevel(String),
    #[error("unknown competency kind {0:?}")]
    UnknownKind(String),
    #[error("score {0} is outside the 1-5 scale")]
    ScoreOutOfRange(i64),

    #[error("placement table has no entries for test {0:?}")]
    UnknownTest(String),
    #[error("no placement range contains score {0}")]
    PlacementScoreOutOfRange(f64),
    #[error("invalid placement table: {0}")]
    InvalidPlacementTable(String),
    #[error("no placement table is configured")]
    PlacementNotConfigured,

    #[error("unknown student {0:?}")]
    UnknownStudent(String),
    #[error("unknown competency {0:?}")]
    UnknownCompetency(String),
    #[error("unknown course {0:?}")]
    UnknownCourse(String),
    #[error("student {student:?} is not enrolled in {context}")]
    StudentNotEnrolled { student: String, context: String },
    #[error("competency {competency:?} is not part of course {course:?}")]
    CompetencyNotInCourse { course: String, competency: String },
    #[error("taxonomy has no competencies at level {0}")]
    EmptyLevel(String),
    #[error("short name {0:?} is already used by another course")]
    DuplicateShortName(String),
    #[error("student id {0:?} already exists")]
    DuplicateStudent(String),
    #[error("course id {0:?} already exists")]
    DuplicateCourse(String),
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported report format {0:?}")]
    UnsupportedFormat(String),
    #[error("cell {0:?} cannot be written as TSV (contains a tab or line break)")]
    TabInData(String),

    #[error("malformed outcomes CSV at line {line}: {message}")]
    MalformedCsv { line: u64, message: String },
    #[error("slug {0:?} already exists with different content")]
    DuplicateSlugConflict(String),

    #[error("corrupt archive: {0}")]
    CorruptArchive(String),
    #[error("unsupported archive format version {0}")]
    UnsupportedVersion(u32),
    #[error("archive level {archive} does not match course level {course}")]
    LevelMismatch { archive: String, course: String },
    #[error("identity conflict for {email:?}: {detail}")]
    IdentityConflict { email: String, detail: String },

    #[error("corrupt store: {0}")]
    CorruptStore(String),
    #[error("store is locked by another process")]
    StoreLocked,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownLevel(_) => "level.unknown",
            Error::UnknownKind(_) => "competency.unknown_kind",
            Error::ScoreOutOfRange(_) => "score.out_of_range",
            Error::UnknownTest(_) => "placement.unknown_test",
            Error::PlacementScoreOutOfRange(_) => "placement.score_out_of_range",
            Error::InvalidPlacementTable(_) => "placement.invalid_table",
            Error::PlacementNotConfigured => "placement.not_configured",
            Error::UnknownStudent(_) => "student.unknown",
            Error::UnknownCompetency(_) => "competency.unknown",
            Error::UnknownCourse(_) => "course.unknown",
            Error::StudentNotEnrolled { .. } => "student.not_enrolled",
            Error::CompetencyNotInCourse { .. } => "competency.not_in_course",
            Error::EmptyLevel(_) => "level.empty",
            Error::DuplicateShortName(_) => "course.duplicate_short_name",
            Error::DuplicateStudent(_) => "student.duplicate",
            Error::DuplicateCourse(_) => "course.duplicate",
            Error::Invalid(_) => "request.invalid",
            Error::UnsupportedFormat(_) => "report.unsupported_format",
            Error::TabInData(_) => "report.tab_in_data",
            Error::MalformedCsv { .. } => "outcomes.malformed_csv",
            Error::DuplicateSlugConflict(_) => "outcomes.duplicate_slug_conflict",
            Error::CorruptArchive(_) => "archive.corrupt",
            Error::UnsupportedVersion(_) => "archive.unsupported_version",
            Error::LevelMismatch { .. } => "archive.level_mismatch",
            Error::IdentityConflict { .. } => "student.identity_conflict",
            Error::CorruptStore(_) => "store.corrupt",
            Error::StoreLocked => "store.locked",
            Error::Io(_) => "io.error",
        }
    }

    /// Coarse classification used by the HTTP layer to pick a status code.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UnknownTest(_)
            | Error::UnknownStudent(_)
            | Error::UnknownCompetency(_)
            | Error::UnknownCourse(_) => ErrorKind::NotFound,
            Error::DuplicateShortName(_)
            | Error::DuplicateStudent(_)
            | Error::DuplicateCourse(_)
            | Error::DuplicateSlugConflict(_)
            | Error::IdentityConflict { .. } => ErrorKind::Conflict,
            Error::LevelMismatch { .. }
            | Error::CorruptArchive(_)
            | Error::UnsupportedVersion(_) => ErrorKind::Unprocessable,
            Error::CorruptStore(_) | Error::StoreLocked | Error::Io(_) => ErrorKind::Internal,
            _ => ErrorKind::Invalid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Invalid,
    NotFound,
    Conflict,
    Unprocessable,
    Internal,
}
