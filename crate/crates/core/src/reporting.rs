//! Views derived from a store snapshot: the grader matrix, user reports, gap
//! analysis, level checklists and spreadsheet export. Everything here is a
//! pure function of `&Store`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CefrLevel, CompetencyScope, Rating, Score, Student};
use crate::store::Store;

/// Range column of the user report.
pub const SCORE_RANGE: &str = "1-5";

/// Mean of the recorded scores, rounded half-up to an integer score.
/// Unrecorded entries are ignored; with nothing recorded the result is
/// Unrecorded.
pub fn rounded_average(ratings: &[Rating]) -> Rating {
    let (sum, n) = recorded_sum(ratings);
    if n == 0 {
        return Rating::Unrecorded;
    }
    // floor(sum / n + 1/2) in integers
    let rounded = (2 * sum + n) / (2 * n);
    let clamped = rounded.clamp(1, 5);
    Rating::Recorded(Score::new(clamped as i64).expect("clamped to scale"))
}

/// Unrounded mean of the recorded scores, to two decimals.
pub fn mean_score(ratings: &[Rating]) -> Option<f64> {
    let (sum, n) = recorded_sum(ratings);
    (n > 0).then(|| (sum as f64 / n as f64 * 100.0).round() / 100.0)
}

fn recorded_sum(ratings: &[Rating]) -> (u64, u64) {
    ratings
        .iter()
        .filter_map(|r| r.score())
        .fold((0, 0), |(sum, n), s| (sum + u64::from(s.value()), n + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraderColumn {
    pub competency_id: String,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraderRow {
    pub student: Student,
    pub cells: Vec<Rating>,
    pub course_total: Rating,
    pub course_total_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraderReport {
    pub course_id: String,
    pub course_name: String,
    pub level: CefrLevel,
    pub columns: Vec<GraderColumn>,
    pub rows: Vec<GraderRow>,
    pub overall_average: Vec<Rating>,
    pub overall_mean: Vec<Option<f64>>,
    /// Average of the row totals.
    pub overall_course_total: Rating,
}

impl GraderReport {
    pub fn column_index(&self, competency_id: &str) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| c.competency_id == competency_id)
    }

    pub fn row(&self, student_id: &str) -> Option<&GraderRow> {
        self.rows.iter().find(|r| r.student.id == student_id)
    }

    pub fn cell(&self, student_id: &str, competency_id: &str) -> Option<Rating> {
        let col = self.column_index(competency_id)?;
        self.row(student_id).map(|r| r.cells[col])
    }

    /// Text for the hover hint over a cell, e.g.
    /// "Ousmane Sembène B1 Connecting words expressing cause and effect, 3".
    pub fn cell_hint(&self, student_id: &str, competency_id: &str) -> Option<String> {
        let col = self.column_index(competency_id)?;
        let row = self.row(student_id)?;
        Some(format!(
            "{} {}, {}",
            row.student.full_name(),
            self.columns[col].title,
            row.cells[col]
        ))
    }
}

pub fn grader_report(store: &Store, course_id: &str) -> Result<GraderReport> {
    let course = store.course(course_id)?;
    let columns: Vec<GraderColumn> = store
        .course_competencies(course_id)?
        .into_iter()
        .map(|c| GraderColumn {
            competency_id: c.id.clone(),
            title: c.title.clone(),
        })
        .collect();
    let rows: Vec<GraderRow> = store
        .roster(course_id)?
        .into_iter()
        .map(|student| {
            let cells: Vec<Rating> = columns
                .iter()
                .map(|col| store.rating_unchecked(&student.id, &col.competency_id))
                .collect();
            GraderRow {
                student: student.clone(),
                course_total: rounded_average(&cells),
                course_total_mean: mean_score(&cells),
                cells,
            }
        })
        .collect();
    let column_ratings = |i: usize| rows.iter().map(|r| r.cells[i]).collect::<Vec<_>>();
    let overall_average = (0..columns.len())
        .map(|i| rounded_average(&column_ratings(i)))
        .collect();
    let overall_mean = (0..columns.len())
        .map(|i| mean_score(&column_ratings(i)))
        .collect();
    let totals: Vec<Rating> = rows.iter().map(|r| r.course_total).collect();
    Ok(GraderReport {
        course_id: course.id.clone(),
        course_name: course.full_name.clone(),
        level: course.level,
        overall_course_total: rounded_average(&totals),
        columns,
        rows,
        overall_average,
        overall_mean,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserReportRow {
    pub competency_id: String,
    pub title: String,
    pub grade: Rating,
    pub range: String,
    pub feedback: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserReport {
    pub student: Student,
    pub course_id: String,
    pub course_name: String,
    /// Aggregate row: rounded mean over the course's competencies.
    pub aggregate: Rating,
    pub rows: Vec<UserReportRow>,
}

pub fn user_report(store: &Store, student_id: &str, course_id: &str) -> Result<UserReport> {
    let course = store.course(course_id)?;
    let student = store.student(student_id)?;
    if !course.is_enrolled(student_id) {
        return Err(Error::StudentNotEnrolled {
            student: student_id.to_string(),
            context: format!("course {course_id:?}"),
        });
    }
    let rows: Vec<UserReportRow> = store
        .course_competencies(course_id)?
        .into_iter()
        .map(|c| UserReportRow {
            competency_id: c.id.clone(),
            title: c.title.clone(),
            grade: store.rating_unchecked(student_id, &c.id),
            range: SCORE_RANGE.to_string(),
            feedback: store
                .latest_feedback(student_id, &c.id)
                .unwrap_or_default()
                .to_string(),
        })
        .collect();
    let grades: Vec<Rating> = rows.iter().map(|r| r.grade).collect();
    Ok(UserReport {
        student: student.clone(),
        course_id: course.id.clone(),
        course_name: course.full_name.clone(),
        aggregate: rounded_average(&grades),
        rows,
    })
}

/// Decides when a topic should go into the class curriculum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapPolicy {
    /// Include the topic when no studied rating exceeds this score.
    pub include_at_or_below: Score,
}

impl Default for GapPolicy {
    fn default() -> Self {
        GapPolicy {
            include_at_or_below: Score::new(3).expect("valid score"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapAnalysis {
    pub course_id: String,
    pub competency_id: String,
    pub title: String,
    /// Students with a recorded rating, with that rating.
    pub studied: Vec<StudiedEntry>,
    /// Students with nothing recorded.
    pub unstudied: Vec<String>,
    pub include_in_curriculum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudiedEntry {
    pub student_id: String,
    pub score: Score,
}

impl GapAnalysis {
    pub fn studied_ids(&self) -> Vec<&str> {
        self.studied.iter().map(|e| e.student_id.as_str()).collect()
    }
}

pub fn gap_analysis(store: &Store, course_id: &str, competency_id: &str) -> Result<GapAnalysis> {
    gap_analysis_with(store, course_id, competency_id, GapPolicy::default())
}

pub fn gap_analysis_with(
    store: &Store,
    course_id: &str,
    competency_id: &str,
    policy: GapPolicy,
) -> Result<GapAnalysis> {
    let course = store.course(course_id)?;
    if !course.has_competency(competency_id) {
        return Err(Error::CompetencyNotInCourse {
            course: course_id.to_string(),
            competency: competency_id.to_string(),
        });
    }
    let title = store.competency(competency_id)?.title.clone();
    let mut studied = Vec::new();
    let mut unstudied = Vec::new();
    for student in store.roster(course_id)? {
        match store.rating_unchecked(&student.id, competency_id) {
            Rating::Recorded(score) => studied.push(StudiedEntry {
                student_id: student.id.clone(),
                score,
            }),
            Rating::Unrecorded => unstudied.push(student.id.clone()),
        }
    }
    let include_in_curriculum = studied
        .iter()
        .all(|e| e.score <= policy.include_at_or_below);
    Ok(GapAnalysis {
        course_id: course_id.to_string(),
        competency_id: competency_id.to_string(),
        title,
        studied,
        unstudied,
        include_in_curriculum,
    })
}

/// Default bar for "satisfactorily completed".
pub const DEFAULT_CHECKLIST_THRESHOLD: u8 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingCompetency {
    pub competency_id: String,
    pub title: String,
    pub rating: Rating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelChecklist {
    pub student_id: String,
    pub level: CefrLevel,
    pub threshold: Score,
    pub missing: Vec<MissingCompetency>,
    pub complete: bool,
}

/// Checks whether a student has every competency of `level` at or above
/// `threshold`. Standard competencies count, plus custom ones owned by a
/// course the student is enrolled in.
pub fn level_checklist(
    store: &Store,
    student_id: &str,
    level: CefrLevel,
    threshold: Score,
) -> Result<LevelChecklist> {
    store.student(student_id)?;
    let relevant: Vec<_> = store
        .taxonomy()
        .at_level(level)
        .filter(|c| match &c.scope {
            CompetencyScope::Standard => true,
            CompetencyScope::Custom(owner) => store
                .course(owner)
                .is_ok_and(|course| course.is_enrolled(student_id)),
        })
        .collect();
    if relevant.is_empty() {
        return Err(Error::EmptyLevel(level.to_string()));
    }
    let missing: Vec<MissingCompetency> = relevant
        .into_iter()
        .filter_map(|c| {
            let rating = store.rating_unchecked(student_id, &c.id);
            let satisfied = rating.score().is_some_and(|s| s >= threshold);
            (!satisfied).then(|| MissingCompetency {
                competency_id: c.id.clone(),
                title: c.title.clone(),
                rating,
            })
        })
        .collect();
    Ok(LevelChecklist {
        student_id: student_id.to_string(),
        level,
        threshold,
        complete: missing.is_empty(),
        missing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Tsv,
}

impl ReportFormat {
    pub fn content_type(self) -> &'static str {
        match self {
            ReportFormat::Csv => "text/csv; charset=utf-8",
            ReportFormat::Tsv => "text/tab-separated-values; charset=utf-8",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Tsv => "tsv",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "tsv" => Ok(ReportFormat::Tsv),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// A report laid out as on-screen: one header row then body rows of text.
pub trait Tabular {
    fn header(&self) -> Vec<String>;
    fn body(&self) -> Vec<Vec<String>>;
}

impl Tabular for GraderReport {
    fn header(&self) -> Vec<String> {
        let mut h = vec![
            "Surname".to_string(),
            "First name".to_string(),
            "Email address".to_string(),
        ];
        h.extend(self.columns.iter().map(|c| c.title.clone()));
        h.push("Course total".to_string());
        h
    }

    fn body(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut line = vec![
                    r.student.surname.clone(),
                    r.student.first_name.clone(),
                    r.student.email.clone(),
                ];
                line.extend(r.cells.iter().map(Rating::to_string));
                line.push(r.course_total.to_string());
                line
            })
            .collect();
        if !self.rows.is_empty() {
            let mut footer = vec!["Overall average".to_string(), String::new(), String::new()];
            footer.extend(self.overall_average.iter().map(Rating::to_string));
            footer.push(self.overall_course_total.to_string());
            out.push(footer);
        }
        out
    }
}

impl Tabular for UserReport {
    fn header(&self) -> Vec<String> {
        ["Grade item", "Grade", "Range", "Feedback"]
            .map(String::from)
            .to_vec()
    }

    fn body(&self) -> Vec<Vec<String>> {
        let mut out = vec![vec![
            self.course_name.clone(),
            self.aggregate.to_string(),
            SCORE_RANGE.to_string(),
            String::new(),
        ]];
        out.extend(self.rows.iter().map(|r| {
            vec![
                r.title.clone(),
                r.grade.to_string(),
                r.range.clone(),
                r.feedback.clone(),
            ]
        }));
        out
    }
}

/// Serializes a report as a UTF-8 spreadsheet. Output is deterministic.
pub fn export_report(report: &dyn Tabular, format: ReportFormat) -> Result<Vec<u8>> {
    let header = report.header();
    let body = report.body();
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .quote_style(csv::QuoteStyle::Necessary)
                .from_writer(Vec::new());
            for row in std::iter::once(&header).chain(body.iter()) {
                w.write_record(row)
                    .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            }
            w.into_inner()
                .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
        }
        ReportFormat::Tsv => {
            let mut out = String::new();
            for row in std::iter::once(&header).chain(body.iter()) {
                if let Some(bad) = row.iter().find(|c| c.contains(['\t', '\n', '\r'])) {
                    return Err(Error::TabInData(bad.clone()));
                }
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
    }
}
