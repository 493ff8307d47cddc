//! Moving records between installations: outcomes CSV ingestion, the
//! portable `.ctar` archive, and the three import destinations.
//!
//! An archive is a zip container with exactly five JSON entries, the manifest
//! first:
//!
//! ```text
//! manifest.json     {format_version, kind: course|dossier, created_at, producer}
//! taxonomy.json     [Competency]
//! course.json       Course (roster = the students in this archive)
//! students.json     [Student]
//! assessments.json  [Assessment]
//! ```
//!
//! Every operation that changes the store works on a private copy and only
//! replaces the caller's store once the whole import succeeded.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{Cursor, Read, Write};
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, ZipArchive, ZipWriter};

use crate::clock::rfc3339_millis;
use crate::error::{Error, Result};
use crate::model::{parse_level, slugify, Competency, CompetencyKind, CompetencyScope, Student};
use crate::store::{Assessment, AssessmentSource, Course, Store};

/// The six-level outcomes file shipped with the crate.
pub const BUNDLED_OUTCOMES_CSV: &str = include_str!("../fixtures/cefr_outcomes.csv");

pub const OUTCOMES_HEADER: [&str; 4] = ["title", "slug", "kind", "description"];

pub const ARCHIVE_FORMAT_VERSION: u32 = 1;
pub const ARCHIVE_EXTENSION: &str = "ctar";
pub const ARCHIVE_CONTENT_TYPE: &str = "application/zip";
pub const PRODUCER: &str = concat!("comptrack/", env!("CARGO_PKG_VERSION"));

const MANIFEST: &str = "manifest.json";
const TAXONOMY: &str = "taxonomy.json";
const COURSE: &str = "course.json";
const STUDENTS: &str = "students.json";
const ASSESSMENTS: &str = "assessments.json";
const ENTRIES: [&str; 5] = [MANIFEST, TAXONOMY, COURSE, STUDENTS, ASSESSMENTS];
pub const MAX_ENTRY_BYTES: u64 = 64 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportScope {
    Standard,
    Custom(String),
}

/// Parses an outcomes file without touching any store.
pub fn parse_outcomes_csv(bytes: &[u8]) -> Result<Vec<Competency>> {
    let malformed = |line: u64, message: String| Error::MalformedCsv { line, message };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes);
    let header = rdr
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    let names: Vec<&str> = header.iter().map(|h| h.trim().trim_start_matches('\u{feff}')).collect();
    if names.is_empty() || (names.len() == 1 && names[0].is_empty()) {
        return Ok(Vec::new());
    }
    if names != OUTCOMES_HEADER {
        return Err(malformed(
            1,
            format!("expected header {}, got {}", OUTCOMES_HEADER.join(","), names.join(",")),
        ));
    }

    let mut out: Vec<Competency> = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let title = field(0);
        if title.is_empty() {
            return Err(malformed(line, "empty title".into()));
        }
        let level_token = title.split_whitespace().next().unwrap_or_default();
        let level = parse_level(level_token)
            .map_err(|_| malformed(line, format!("title {title:?} does not start with a CEFR level")))?;
        let slug = match field(1) {
            "" => slugify(title),
            s => s.to_string(),
        };
        let kind: CompetencyKind = field(2)
            .parse()
            .map_err(|_| malformed(line, format!("unknown kind {:?}", field(2))))?;
        if !seen.insert(slug.clone()) {
            return Err(malformed(line, format!("duplicate slug {slug:?}")));
        }
        let description = Some(field(3).to_string()).filter(|d| !d.is_empty());
        out.push(Competency {
            id: slug,
            level,
            kind,
            title: title.to_string(),
            description,
            scope: CompetencyScope::Standard,
        });
    }
    Ok(out)
}

/// Adds the competencies of an outcomes file to the taxonomy and returns the
/// newly added ones. Rows identical to existing entries are skipped.
///
/// With a custom scope the competencies belong to that course, are appended
/// to its columns, and must all share its level.
pub fn import_outcomes_csv(store: &mut Store, bytes: &[u8], scope: &ImportScope) -> Result<Vec<Competency>> {
    let mut parsed = parse_outcomes_csv(bytes)?;
    if let ImportScope::Custom(course_id) = scope {
        let level = store.course(course_id)?.level;
        if let Some(bad) = parsed.iter().find(|c| c.level != level) {
            return Err(Error::Invalid(format!(
                "custom outcome {:?} is {} but course {course_id:?} is {level}",
                bad.id, bad.level
            )));
        }
        for c in &mut parsed {
            c.scope = CompetencyScope::Custom(course_id.clone());
        }
    }
    let mut work = store.clone();
    let mut added = Vec::new();
    for c in &parsed {
        if work.taxonomy_mut().insert(c.clone())? {
            added.push(c.clone());
        }
    }
    if let ImportScope::Custom(course_id) = scope {
        let ids: Vec<String> = parsed.iter().map(|c| c.id.clone()).collect();
        work.attach_competencies(course_id, &ids)?;
    }
    *store = work;
    Ok(added)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchiveKind {
    Course,
    Dossier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub kind: ArchiveKind,
    #[serde(with = "rfc3339_millis")]
    pub created_at: DateTime<Utc>,
    pub producer: String,
}

/// Decoded contents of a `.ctar` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    pub manifest: Manifest,
    pub taxonomy: Vec<Competency>,
    pub course: Course,
    pub students: Vec<Student>,
    pub assessments: Vec<Assessment>,
}

impl Archive {
    /// Structural checks that import relies on.
    pub fn validate(&self) -> Result<()> {
        let corrupt = |m: String| Err(Error::CorruptArchive(m));
        if self.manifest.format_version != ARCHIVE_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(self.manifest.format_version));
        }
        let mut comp_ids = HashSet::new();
        for c in &self.taxonomy {
            c.validate().map_err(|e| Error::CorruptArchive(e.to_string()))?;
            if !comp_ids.insert(c.id.as_str()) {
                return corrupt(format!("competency {:?} listed twice", c.id));
            }
        }
        let mut student_ids = HashSet::new();
        for s in &self.students {
            s.validate().map_err(|e| Error::CorruptArchive(e.to_string()))?;
            if !student_ids.insert(s.id.as_str()) {
                return corrupt(format!("student {:?} listed twice", s.id));
            }
        }
        if self.manifest.kind == ArchiveKind::Dossier && self.students.len() != 1 {
            return corrupt(format!("dossier holds {} students", self.students.len()));
        }
        for cid in &self.course.competency_ids {
            match self.taxonomy.iter().find(|c| &c.id == cid) {
                None => return corrupt(format!("course competency {cid:?} missing from taxonomy")),
                Some(c) if c.level != self.course.level => {
                    return corrupt(format!("course competency {cid:?} is not {}", self.course.level))
                }
                Some(_) => {}
            }
        }
        let roster: BTreeSet<&str> = self.course.roster.iter().map(String::as_str).collect();
        let listed: BTreeSet<&str> = student_ids.iter().copied().collect();
        if roster != listed {
            return corrupt("course roster does not match students.json".into());
        }
        for a in &self.assessments {
            if !student_ids.contains(a.student_id.as_str()) {
                return corrupt(format!("assessment references unknown student {:?}", a.student_id));
            }
            if !comp_ids.contains(a.competency_id.as_str()) {
                return corrupt(format!(
                    "assessment references unknown competency {:?}",
                    a.competency_id
                ));
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let io = |e: zip::result::ZipError| Error::Io(std::io::Error::other(e));
        let json = |v: &dyn erased::Json| v.to_json();
        let parts: [(&str, Vec<u8>); 5] = [
            (MANIFEST, json(&self.manifest)?),
            (TAXONOMY, json(&self.taxonomy)?),
            (COURSE, json(&self.course)?),
            (STUDENTS, json(&self.students)?),
            (ASSESSMENTS, json(&self.assessments)?),
        ];
        // Fixed entry timestamps keep the bytes a pure function of the content.
        let options = SimpleFileOptions::default()
            .compression_method(CompressionMethod::Deflated)
            .last_modified_time(zip::DateTime::default());
        let mut zw = ZipWriter::new(Cursor::new(Vec::new()));
        for (name, bytes) in parts {
            zw.start_file(name, options).map_err(io)?;
            zw.write_all(&bytes)?;
        }
        Ok(zw.finish().map_err(io)?.into_inner())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let corrupt = |m: String| Error::CorruptArchive(m);
        let mut zip = ZipArchive::new(Cursor::new(bytes)).map_err(|e| corrupt(e.to_string()))?;
        let names: Vec<String> = (0..zip.len())
            .map(|i| zip.by_index(i).map(|f| f.name().to_string()))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| corrupt(e.to_string()))?;
        if names.first().map(String::as_str) != Some(MANIFEST) {
            return Err(corrupt("manifest.json must be the first entry".into()));
        }
        let mut sorted = names.clone();
        sorted.sort();
        let mut expected = ENTRIES.map(String::from).to_vec();
        expected.sort();
        if sorted != expected {
            return Err(corrupt(format!("unexpected entries {names:?}")));
        }

        let manifest: Manifest = read_entry(&mut zip, MANIFEST)?;
        if manifest.format_version != ARCHIVE_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(manifest.format_version));
        }
        let archive = Archive {
            manifest,
            taxonomy: read_entry(&mut zip, TAXONOMY)?,
            course: read_entry(&mut zip, COURSE)?,
            students: read_entry(&mut zip, STUDENTS)?,
            assessments: read_entry(&mut zip, ASSESSMENTS)?,
        };
        archive.validate()?;
        Ok(archive)
    }

    /// Suggested download name, e.g. `dossier-b1-gm-20130621-0746.ctar`.
    pub fn file_name(&self) -> String {
        let stamp = self.manifest.created_at.format("%Y%m%d-%H%M");
        match self.manifest.kind {
            ArchiveKind::Course => format!("course-{}-{stamp}.{ARCHIVE_EXTENSION}", slugify(&self.course.id)),
            ArchiveKind::Dossier => format!(
                "dossier-{}-{}-{stamp}.{ARCHIVE_EXTENSION}",
                slugify(&self.course.id),
                slugify(&self.students[0].id)
            ),
        }
    }
}

mod erased {
    use crate::error::{Error, Result};

    pub trait Json {
        fn to_json(&self) -> Result<Vec<u8>>;
    }

    impl<T: serde::Serialize> Json for T {
        fn to_json(&self) -> Result<Vec<u8>> {
            serde_json::to_vec_pretty(self).map_err(|e| Error::Io(std::io::Error::other(e)))
        }
    }
}

fn read_entry<T: DeserializeOwned>(zip: &mut ZipArchive<Cursor<&[u8]>>, name: &str) -> Result<T> {
    let corrupt = |m: String| Error::CorruptArchive(format!("{name}: {m}"));
    let file = zip.by_name(name).map_err(|e| corrupt(e.to_string()))?;
    let mut buf = Vec::new();
    file.take(MAX_ENTRY_BYTES + 1)
        .read_to_end(&mut buf)
        .map_err(|e| corrupt(e.to_string()))?;
    if buf.len() as u64 > MAX_ENTRY_BYTES {
        return Err(corrupt("entry too large".into()));
    }
    serde_json::from_slice(&buf).map_err(|e| corrupt(e.to_string()))
}

/// Packs a course with its full roster.
pub fn export_archive(store: &Store, course_id: &str) -> Result<Archive> {
    let course = store.course(course_id)?;
    let students: Vec<&Student> = store.roster(course_id)?;
    build_archive(store, course, students, ArchiveKind::Course)
}

/// Packs a course restricted to one enrolled student.
pub fn export_dossier(store: &Store, course_id: &str, student_id: &str) -> Result<Archive> {
    let course = store.course(course_id)?;
    let student = store.student(student_id)?;
    if !course.is_enrolled(student_id) {
        return Err(Error::StudentNotEnrolled {
            student: student_id.to_string(),
            context: format!("course {course_id:?}"),
        });
    }
    build_archive(store, course, vec![student], ArchiveKind::Dossier)
}

fn build_archive(store: &Store, course: &Course, students: Vec<&Student>, kind: ArchiveKind) -> Result<Archive> {
    let taxonomy: Vec<Competency> = store
        .course_competencies(&course.id)?
        .into_iter()
        .cloned()
        .collect();
    let ids: HashSet<&str> = students.iter().map(|s| s.id.as_str()).collect();
    let assessments = store
        .assessments()
        .iter()
        .filter(|a| ids.contains(a.student_id.as_str()) && course.has_competency(&a.competency_id))
        .cloned()
        .collect();
    let mut course = course.clone();
    course.roster = ids.iter().map(|s| s.to_string()).collect();
    let archive = Archive {
        manifest: Manifest {
            format_version: ARCHIVE_FORMAT_VERSION,
            kind,
            created_at: store.now(),
            producer: PRODUCER.to_string(),
        },
        taxonomy,
        course,
        students: students.into_iter().cloned().collect(),
        assessments,
    };
    archive.validate()?;
    Ok(archive)
}

/// Where an imported archive lands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportDestination {
    /// A fresh "… copy N" course; the optional name replaces the archive's
    /// full name as the base.
    NewCourse(Option<String>),
    MergeInto(String),
    Replace(String),
}

impl FromStr for ImportDestination {
    type Err = Error;

    /// `new`, `new:<name>`, `merge:<course>` or `replace:<course>`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match (head, rest) {
            ("new", None) => Ok(ImportDestination::NewCourse(None)),
            ("new", Some(name)) if !name.trim().is_empty() => {
                Ok(ImportDestination::NewCourse(Some(name.to_string())))
            }
            ("merge", Some(id)) if !id.is_empty() => Ok(ImportDestination::MergeInto(id.to_string())),
            ("replace", Some(id)) if !id.is_empty() => Ok(ImportDestination::Replace(id.to_string())),
            _ => Err(Error::Invalid(format!(
                "destination {s:?} is not new, new:<name>, merge:<course> or replace:<course>"
            ))),
        }
    }
}

impl fmt::Display for ImportDestination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImportDestination::NewCourse(None) => f.write_str("new"),
            ImportDestination::NewCourse(Some(n)) => write!(f, "new:{n}"),
            ImportDestination::MergeInto(c) => write!(f, "merge:{c}"),
            ImportDestination::Replace(c) => write!(f, "replace:{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeSummary {
    pub students_added: usize,
    pub assessments_added: usize,
    pub assessments_skipped: usize,
    pub competencies_added: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportOutcome {
    pub course_id: String,
    pub summary: MergeSummary,
}

pub fn import_archive(store: &mut Store, bytes: &[u8], dest: &ImportDestination) -> Result<ImportOutcome> {
    let archive = Archive::from_bytes(bytes)?;
    import_decoded(store, &archive, dest)
}

/// Imports an already decoded archive.
pub fn import_decoded(store: &mut Store, archive: &Archive, dest: &ImportDestination) -> Result<ImportOutcome> {
    archive.validate()?;
    let mut work = store.clone();
    let course_id = match dest {
        ImportDestination::NewCourse(name) => create_copy_course(&mut work, archive, name.as_deref()),
        ImportDestination::MergeInto(id) => {
            check_level(&work, id, archive)?;
            id.clone()
        }
        ImportDestination::Replace(id) => {
            let course = work.course_mut(id)?;
            course.roster.clear();
            course.competency_ids.clear();
            course.level = archive.course.level;
            id.clone()
        }
    };
    let summary = apply_archive(&mut work, &course_id, archive)?;
    *store = work;
    Ok(ImportOutcome { course_id, summary })
}

/// Merges an archive into an existing course of the same level.
///
/// Students are matched by id, then by exact email. Incoming assessments are
/// appended as imports unless the same record is already present, so merging
/// never removes or rewrites existing history.
pub fn merge_into(store: &mut Store, course_id: &str, archive: &Archive) -> Result<MergeSummary> {
    let dest = ImportDestination::MergeInto(course_id.to_string());
    import_decoded(store, archive, &dest).map(|o| o.summary)
}

fn check_level(store: &Store, course_id: &str, archive: &Archive) -> Result<()> {
    let course = store.course(course_id)?;
    if course.level != archive.course.level {
        return Err(Error::LevelMismatch {
            archive: archive.course.level.to_string(),
            course: course.level.to_string(),
        });
    }
    Ok(())
}

fn create_copy_course(store: &mut Store, archive: &Archive, name: Option<&str>) -> String {
    let base_full = name.unwrap_or(&archive.course.full_name);
    let base_short = &archive.course.short_name;
    let taken_short: HashSet<&str> = store.courses().map(|c| c.short_name.as_str()).collect();
    let n = (1..)
        .find(|n| !taken_short.contains(format!("{base_short} copy {n}").as_str()))
        .expect("unbounded search");
    let short_name = format!("{base_short} copy {n}");
    let base_id = slugify(&short_name);
    let base_id = if base_id.is_empty() { format!("course-copy-{n}") } else { base_id };
    let id = std::iter::once(base_id.clone())
        .chain((2..).map(|k| format!("{base_id}-{k}")))
        .find(|id| store.course(id).is_err())
        .expect("unbounded search");
    store.insert_course(Course {
        id: id.clone(),
        full_name: format!("{base_full} copy {n}"),
        short_name,
        level: archive.course.level,
        competency_ids: Vec::new(),
        roster: BTreeSet::new(),
    });
    id
}

fn apply_archive(store: &mut Store, course_id: &str, archive: &Archive) -> Result<MergeSummary> {
    let mut summary = MergeSummary::default();

    let mut local_ids: HashMap<&str, String> = HashMap::new();
    for incoming in &archive.students {
        let local = resolve_student(store, incoming)?;
        let local_id = match local {
            Some(id) => id,
            None => {
                store.add_student(incoming.clone())?;
                summary.students_added += 1;
                incoming.id.clone()
            }
        };
        local_ids.insert(incoming.id.as_str(), local_id);
    }

    for c in &archive.taxonomy {
        let mut c = c.clone();
        if let CompetencyScope::Custom(_) = c.scope {
            c.scope = CompetencyScope::Custom(course_id.to_string());
        }
        if store.taxonomy_mut().insert(c)? {
            summary.competencies_added += 1;
        }
    }
    store.attach_competencies(course_id, &archive.course.competency_ids)?;

    for local_id in local_ids.values() {
        store.enroll(course_id, local_id)?;
    }

    for a in &archive.assessments {
        let mut a = a.clone();
        a.student_id = local_ids[a.student_id.as_str()].clone();
        a.source = AssessmentSource::Import;
        if store.contains_record(&a) {
            summary.assessments_skipped += 1;
        } else {
            store.append_assessment(a)?;
            summary.assessments_added += 1;
        }
    }
    Ok(summary)
}

/// Finds the local student an incoming record refers to. Matching is by id,
/// then by exact email; a match with a different name is a conflict.
fn resolve_student(store: &Store, incoming: &Student) -> Result<Option<String>> {
    let same_name = |s: &Student| s.surname == incoming.surname && s.first_name == incoming.first_name;
    if let Ok(existing) = store.student(&incoming.id) {
        if !same_name(existing) {
            return Err(Error::IdentityConflict {
                email: incoming.email.clone(),
                detail: format!(
                    "student id {:?} belongs to {} locally but {} in the archive",
                    incoming.id,
                    existing.full_name(),
                    incoming.full_name()
                ),
            });
        }
        return Ok(Some(existing.id.clone()));
    }
    if let Some(existing) = store.student_by_email(&incoming.email) {
        if !same_name(existing) {
            return Err(Error::IdentityConflict {
                email: incoming.email.clone(),
                detail: format!(
                    "email belongs to {} locally but {} in the archive",
                    existing.full_name(),
                    incoming.full_name()
                ),
            });
        }
        return Ok(Some(existing.id.clone()));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::ManualClock;
    use crate::model::{CefrLevel, Score};
    use crate::reporting::grader_report;
    use crate::store::CourseDraft;
    use std::sync::Arc;

    fn clock() -> Arc<ManualClock> {
        Arc::new(ManualClock::starting_at_millis(1_371_800_000_000, 1_000))
    }

    fn b1_store() -> Store {
        let mut s = Store::with_clock(clock());
        import_outcomes_csv(&mut s, BUNDLED_OUTCOMES_CSV.as_bytes(), &ImportScope::Standard).unwrap();
        s.create_course(CourseDraft {
            id: Some("b1".into()),
            full_name: "CEFR B1 Grammar Competencies".into(),
            short_name: "CEFR B1 Comp".into(),
            level: CefrLevel::B1,
            kind: Some(CompetencyKind::Grammar),
            ..Default::default()
        })
        .unwrap();
        for (id, sur, first, email) in [
            ("gm", "Garcia-Marquez", "Gabriel", "g@b.com"),
            ("ag", "Goswami", "Amar", "f@b.com"),
        ] {
            s.add_student(Student::new(id, sur, first, email).unwrap()).unwrap();
            s.enroll("b1", id).unwrap();
        }
        s.record_assessment("gm", "b1-modals-past", Score::new(3).unwrap(), None, "rb").unwrap();
        s
    }

    #[test]
    fn bundled_outcomes_parse() {
        let comps = parse_outcomes_csv(BUNDLED_OUTCOMES_CSV.as_bytes()).unwrap();
        for level in CefrLevel::ALL {
            let grammar = comps
                .iter()
                .filter(|c| c.level == level && c.kind == CompetencyKind::Grammar)
                .count();
            assert!((25..=35).contains(&grammar), "{level}: {grammar}");
            assert!(comps.iter().any(|c| c.level == level && c.kind == CompetencyKind::Function));
        }
        assert!(comps.iter().all(|c| c.title.starts_with(c.level.as_str())));
    }

    #[test]
    fn header_only_file_is_empty() {
        assert!(parse_outcomes_csv(b"title,slug,kind,description\n").unwrap().is_empty());
        assert!(parse_outcomes_csv(b"").unwrap().is_empty());
    }

    #[test]
    fn malformed_rows_report_their_line() {
        let bad_level = b"title,slug,kind,description\nB1 Passives,b1-passives,grammar,\nX9 Nonsense,x,grammar,\n";
        assert!(matches!(
            parse_outcomes_csv(bad_level),
            Err(Error::MalformedCsv { line: 3, .. })
        ));
        let bad_kind = b"title,slug,kind,description\nB1 Passives,b1-passives,lexis,\n";
        assert!(matches!(parse_outcomes_csv(bad_kind), Err(Error::MalformedCsv { line: 2, .. })));
        let dup = b"title,slug,kind,description\nB1 A,x,grammar,\nB1 B,x,grammar,\n";
        assert!(matches!(parse_outcomes_csv(dup), Err(Error::MalformedCsv { line: 3, .. })));
        let header = b"name,slug,kind,description\n";
        assert!(matches!(parse_outcomes_csv(header), Err(Error::MalformedCsv { line: 1, .. })));
    }

    #[test]
    fn slug_defaults_to_title() {
        let comps = parse_outcomes_csv(b"title,slug,kind,description\nB1 Modals: Past,,grammar,\n").unwrap();
        assert_eq!(comps[0].id, "b1-modals-past");
    }

    #[test]
    fn reimport_is_noop_and_conflict_detected() {
        let mut s = Store::new();
        let first = import_outcomes_csv(&mut s, BUNDLED_OUTCOMES_CSV.as_bytes(), &ImportScope::Standard).unwrap();
        assert_eq!(first.len(), s.taxonomy().len());
        let before = s.clone();
        let second = import_outcomes_csv(&mut s, BUNDLED_OUTCOMES_CSV.as_bytes(), &ImportScope::Standard).unwrap();
        assert!(second.is_empty());
        assert_eq!(s, before);

        let changed = b"title,slug,kind,description\nB1 Modals: Past (revised),b1-modals-past,grammar,\n";
        assert!(matches!(
            import_outcomes_csv(&mut s, changed, &ImportScope::Standard),
            Err(Error::DuplicateSlugConflict(_))
        ));
        assert_eq!(s, before);
    }

    #[test]
    fn custom_scope_attaches_to_course() {
        let mut s = b1_store();
        let csv = b"title,slug,kind,description\nB1 Phrasal verbs for travel,house-b1-travel,grammar,in-house\n";
        let added = import_outcomes_csv(&mut s, csv, &ImportScope::Custom("b1".into())).unwrap();
        assert_eq!(added.len(), 1);
        assert_eq!(added[0].scope, CompetencyScope::Custom("b1".into()));
        assert_eq!(s.course("b1").unwrap().competency_ids.last().unwrap(), "house-b1-travel");

        let wrong_level = b"title,slug,kind,description\nA2 Something,house-a2,grammar,\n";
        assert!(import_outcomes_csv(&mut s, wrong_level, &ImportScope::Custom("b1".into())).is_err());
        assert!(matches!(
            import_outcomes_csv(&mut s, csv, &ImportScope::Custom("zz".into())),
            Err(Error::UnknownCourse(_))
        ));
    }

    #[test]
    fn dossier_holds_one_student() {
        let s = b1_store();
        let a = export_dossier(&s, "b1", "gm").unwrap();
        assert_eq!(a.manifest.kind, ArchiveKind::Dossier);
        assert_eq!(a.students.len(), 1);
        assert_eq!(a.assessments.len(), 1);
        let back = Archive::from_bytes(&a.to_bytes().unwrap()).unwrap();
        assert_eq!(back, a);
        assert!(a.file_name().starts_with("dossier-b1-gm-"));
        assert!(a.file_name().ends_with(".ctar"));
    }

    #[test]
    fn dossier_requires_enrollment() {
        let mut s = b1_store();
        s.unenroll("b1", "ag").unwrap();
        assert!(matches!(export_dossier(&s, "b1", "ag"), Err(Error::StudentNotEnrolled { .. })));
        assert!(matches!(export_archive(&s, "zz"), Err(Error::UnknownCourse(_))));
    }

    #[test]
    fn empty_course_archive_is_valid() {
        let mut s = b1_store();
        s.create_course(CourseDraft {
            id: Some("empty".into()),
            full_name: "Empty".into(),
            short_name: "Empty".into(),
            level: CefrLevel::A1,
            ..Default::default()
        })
        .unwrap();
        let a = export_archive(&s, "empty").unwrap();
        let back = Archive::from_bytes(&a.to_bytes().unwrap()).unwrap();
        assert!(back.students.is_empty() && back.assessments.is_empty());
    }

    #[test]
    fn archive_bytes_are_deterministic() {
        let s = b1_store();
        let a = export_archive(&s, "b1").unwrap();
        assert_eq!(a.to_bytes().unwrap(), a.to_bytes().unwrap());
    }

    #[test]
    fn entry_order_and_layout() {
        let s = b1_store();
        let bytes = export_archive(&s, "b1").unwrap().to_bytes().unwrap();
        let zip = ZipArchive::new(Cursor::new(bytes.as_slice())).unwrap();
        let names: Vec<_> = zip.file_names().collect();
        assert_eq!(names.len(), 5);
        let mut zip = zip;
        assert_eq!(zip.by_index(0).unwrap().name(), MANIFEST);
    }

    #[test]
    fn truncated_or_foreign_bytes_are_corrupt() {
        let s = b1_store();
        let bytes = export_archive(&s, "b1").unwrap().to_bytes().unwrap();
        assert!(matches!(Archive::from_bytes(&bytes[..bytes.len() / 2]), Err(Error::CorruptArchive(_))));
        assert!(matches!(Archive::from_bytes(b"not a zip"), Err(Error::CorruptArchive(_))));
    }

    fn rezip(entries: &[(&str, Vec<u8>)]) -> Vec<u8> {
        let mut zw = ZipWriter::new(Cursor::new(Vec::new()));
        for (name, bytes) in entries {
            zw.start_file(*name, SimpleFileOptions::default()).unwrap();
            zw.write_all(bytes).unwrap();
        }
        zw.finish().unwrap().into_inner()
    }

    fn entries_of(a: &Archive) -> Vec<(&'static str, Vec<u8>)> {
        vec![
            (MANIFEST, serde_json::to_vec(&a.manifest).unwrap()),
            (TAXONOMY, serde_json::to_vec(&a.taxonomy).unwrap()),
            (COURSE, serde_json::to_vec(&a.course).unwrap()),
            (STUDENTS, serde_json::to_vec(&a.students).unwrap()),
            (ASSESSMENTS, serde_json::to_vec(&a.assessments).unwrap()),
        ]
    }

    #[test]
    fn unsupported_version_and_layout_checks() {
        let s = b1_store();
        let mut a = export_archive(&s, "b1").unwrap();
        a.manifest.format_version = 2;
        assert!(matches!(Archive::from_bytes(&rezip(&entries_of(&a))), Err(Error::UnsupportedVersion(2))));

        let a = export_archive(&s, "b1").unwrap();
        let mut e = entries_of(&a);
        e.rotate_left(1);
        assert!(matches!(Archive::from_bytes(&rezip(&e)), Err(Error::CorruptArchive(_))));

        let mut e = entries_of(&a);
        e.push(("extra.json", b"{}".to_vec()));
        assert!(matches!(Archive::from_bytes(&rezip(&e)), Err(Error::CorruptArchive(_))));

        let mut broken = a.clone();
        broken.assessments[0].competency_id = "ghost".into();
        assert!(matches!(Archive::from_bytes(&rezip(&entries_of(&broken))), Err(Error::CorruptArchive(_))));
    }

    #[test]
    fn destination_parsing() {
        assert_eq!("new".parse::<ImportDestination>().unwrap(), ImportDestination::NewCourse(None));
        assert_eq!(
            "merge:b1".parse::<ImportDestination>().unwrap(),
            ImportDestination::MergeInto("b1".into())
        );
        assert_eq!(
            "replace:b1".parse::<ImportDestination>().unwrap(),
            ImportDestination::Replace("b1".into())
        );
        assert_eq!(
            "new:Kenzaburo Oe B1".parse::<ImportDestination>().unwrap().to_string(),
            "new:Kenzaburo Oe B1"
        );
        assert!("merge:".parse::<ImportDestination>().is_err());
        assert!("copy".parse::<ImportDestination>().is_err());
    }

    #[test]
    fn new_course_copies_are_numbered() {
        let mut s = b1_store();
        let bytes = export_archive(&s, "b1").unwrap().to_bytes().unwrap();
        let first = import_archive(&mut s, &bytes, &ImportDestination::NewCourse(None)).unwrap();
        let second = import_archive(&mut s, &bytes, &ImportDestination::NewCourse(None)).unwrap();
        assert_eq!(s.course(&first.course_id).unwrap().full_name, "CEFR B1 Grammar Competencies copy 1");
        assert_eq!(s.course(&second.course_id).unwrap().full_name, "CEFR B1 Grammar Competencies copy 2");
        assert_eq!(s.course(&second.course_id).unwrap().short_name, "CEFR B1 Comp copy 2");
        // same installation: nothing new besides the courses
        assert_eq!(second.summary.students_added, 0);
        assert_eq!(second.summary.assessments_added, 0);
        let src = grader_report(&s, "b1").unwrap();
        let copy = grader_report(&s, &second.course_id).unwrap();
        assert_eq!(src.rows, copy.rows);
    }

    #[test]
    fn merge_own_export_is_noop() {
        let mut s = b1_store();
        let a = export_archive(&s, "b1").unwrap();
        let before = s.clone();
        let summary = merge_into(&mut s, "b1", &a).unwrap();
        assert_eq!(
            summary,
            MergeSummary {
                assessments_skipped: a.assessments.len(),
                ..MergeSummary::default()
            }
        );
        assert_eq!(s, before);
    }

    #[test]
    fn merge_later_reassessment_wins() {
        let mut src = b1_store();
        let mut dst = b1_store();
        src.record_assessment("gm", "b1-modals-past", Score::new(5).unwrap(), None, "other").unwrap();
        // dst's clock is behind src's, so the imported 5 is newer than dst's 3
        let a = export_dossier(&src, "b1", "gm").unwrap();
        let summary = merge_into(&mut dst, "b1", &a).unwrap();
        assert_eq!(summary.assessments_added, 1);
        assert_eq!(summary.assessments_skipped, 1);
        assert_eq!(dst.current_rating("gm", "b1-modals-past").unwrap(), Score::new(5).unwrap().into());
    }

    #[test]
    fn merge_matches_by_email_and_remaps() {
        let src = b1_store();
        let a = export_dossier(&src, "b1", "gm").unwrap();
        let mut dst = Store::with_clock(clock());
        import_outcomes_csv(&mut dst, BUNDLED_OUTCOMES_CSV.as_bytes(), &ImportScope::Standard).unwrap();
        dst.create_course(CourseDraft {
            id: Some("class".into()),
            full_name: "B1 class".into(),
            short_name: "B1 class".into(),
            level: CefrLevel::B1,
            ..Default::default()
        })
        .unwrap();
        dst.add_student(Student::new("s-0042", "Garcia-Marquez", "Gabriel", "g@b.com").unwrap()).unwrap();
        let summary = merge_into(&mut dst, "class", &a).unwrap();
        assert_eq!(summary.students_added, 0);
        assert!(dst.course("class").unwrap().is_enrolled("s-0042"));
        assert_eq!(dst.current_rating("s-0042", "b1-modals-past").unwrap(), Score::new(3).unwrap().into());
        assert!(dst.student("gm").is_err());
    }

    #[test]
    fn identity_conflicts_surface() {
        let src = b1_store();
        let a = export_dossier(&src, "b1", "gm").unwrap();
        let mut dst = b1_store();
        dst.add_student(Student::new("x", "Someone", "Else", "other@b.com").unwrap()).unwrap();
        let mut tampered = a.clone();
        tampered.students[0].id = "x2".into();
        tampered.course.roster = ["x2".to_string()].into();
        tampered.assessments[0].student_id = "x2".into();
        tampered.students[0].email = "other@b.com".into();
        let before = dst.clone();
        assert!(matches!(merge_into(&mut dst, "b1", &tampered), Err(Error::IdentityConflict { .. })));
        assert_eq!(dst, before);

        let mut renamed = a;
        renamed.students[0].first_name = "Gabo".into();
        assert!(matches!(merge_into(&mut dst, "b1", &renamed), Err(Error::IdentityConflict { .. })));
    }

    #[test]
    fn level_mismatch_rejected() {
        let mut s = b1_store();
        s.create_course(CourseDraft {
            id: Some("a2".into()),
            full_name: "CEFR A2".into(),
            short_name: "CEFR A2".into(),
            level: CefrLevel::A2,
            ..Default::default()
        })
        .unwrap();
        s.enroll("a2", "gm").unwrap();
        let a = export_archive(&s, "a2").unwrap();
        assert!(matches!(merge_into(&mut s, "b1", &a), Err(Error::LevelMismatch { .. })));
        assert!(matches!(
            merge_into(&mut s, "nope", &a),
            Err(Error::UnknownCourse(_))
        ));
    }

    #[test]
    fn replace_swaps_roster_but_keeps_history() {
        let mut s = b1_store();
        s.create_course(CourseDraft {
            id: Some("solo".into()),
            full_name: "Solo".into(),
            short_name: "Solo".into(),
            level: CefrLevel::B1,
            competency_ids: Some(vec!["b1-passives".into()]),
            ..Default::default()
        })
        .unwrap();
        s.enroll("solo", "gm").unwrap();
        s.record_assessment("gm", "b1-passives", Score::new(2).unwrap(), None, "rb").unwrap();
        let dossier = export_dossier(&s, "b1", "ag").unwrap();
        let before = s.assessments().len();
        let out = import_decoded(&mut s, &dossier, &ImportDestination::Replace("solo".into())).unwrap();
        let course = s.course(&out.course_id).unwrap();
        assert_eq!(course.roster.iter().collect::<Vec<_>>(), vec!["ag"]);
        assert_eq!(course.competency_ids, s.course("b1").unwrap().competency_ids);
        assert_eq!(s.assessments().len(), before);
        assert_eq!(s.current_rating("gm", "b1-passives").unwrap(), Score::new(2).unwrap().into());
    }
}
