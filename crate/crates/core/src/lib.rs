//! Competency tracking for language learners.
//!
//! Students are rated per CEFR competency on a five-point scale. Ratings form
//! an append-only history from which grade books, user reports, gap analyses
//! and level checklists are derived. Course gradebooks and single-student
//! dossiers travel between installations as portable archives.

pub mod clock;
pub mod error;
pub mod model;
pub mod reporting;
pub mod store;

pub use clock::{Clock, ManualClock, SystemClock};
pub use error::{Error, ErrorKind, Result};
pub use model::{
    parse_level, place_student, score_label, slugify, CefrLevel, Competency, CompetencyKind,
    CompetencyScope, PlacementEntry, PlacementTable, Rating, Score, Student,
};
pub use store::{
    Assessment, AssessmentSource, Course, CourseDraft, DataDirLock, Dossier, SharedStore, Store, Taxonomy,
};
pub mod portability;
pub use portability::{
    export_archive, export_dossier, import_archive, import_outcomes_csv, merge_into, Archive, ArchiveKind,
    ImportDestination, ImportOutcome, ImportScope, MergeSummary,
};
pub use reporting::{
    export_report, gap_analysis, grader_report, level_checklist, rounded_average, user_report, GapAnalysis,
    GraderReport, LevelChecklist, ReportFormat, UserReport,
};
