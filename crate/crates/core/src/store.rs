//! The assessment store: taxonomy, students, course rosters and the
//! append-only assessment log.
//!
//! Assessments are never edited or removed. The value shown in a grade cell is
//! derived from the history of its (student, competency) pair: the record with
//! the latest timestamp wins, ties go to the higher score, and any remaining
//! tie prefers a locally recorded assessment over an imported one.
//!
//! Course membership and assessment history are separate. Unenrolling a
//! student only edits the roster, so the student's dossier stays intact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clock::{rfc3339_millis, truncate_millis, Clock, SystemClock};
use crate::error::{Error, Result};
use crate::model::{
    slugify, CefrLevel, Competency, CompetencyKind, CompetencyScope, Rating, Score, Student,
};

pub const STORE_FORMAT_VERSION: u32 = 1;
pub const STORE_FILE_NAME: &str = "store.json";
pub const LOCK_FILE_NAME: &str = "store.lock";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssessmentSource {
    Import,
    Local,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assessment {
    pub student_id: String,
    pub competency_id: String,
    pub score: Score,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<String>,
    pub assessor: String,
    #[serde(with = "rfc3339_millis")]
    pub timestamp: DateTime<Utc>,
    pub source: AssessmentSource,
}

impl Assessment {
    /// Key deciding which record supplies the current rating.
    fn precedence(&self) -> (DateTime<Utc>, Score, AssessmentSource) {
        (self.timestamp, self.score, self.source)
    }

    /// Exact-record identity used for duplicate detection on merge.
    pub fn same_record(&self, other: &Assessment) -> bool {
        self.student_id == other.student_id
            && self.competency_id == other.competency_id
            && self.score == other.score
            && self.timestamp == other.timestamp
            && self.assessor == other.assessor
    }
}

/// A per-level gradebook: which competencies are tracked and who is enrolled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Course {
    pub id: String,
    pub full_name: String,
    pub short_name: String,
    pub level: CefrLevel,
    pub competency_ids: Vec<String>,
    pub roster: BTreeSet<String>,
}

impl Course {
    pub fn has_competency(&self, competency_id: &str) -> bool {
        self.competency_ids.iter().any(|c| c == competency_id)
    }

    pub fn is_enrolled(&self, student_id: &str) -> bool {
        self.roster.contains(student_id)
    }
}

/// Parameters for creating a course. When `competency_ids` is absent the
/// course tracks every standard competency at its level (optionally only one
/// kind), in taxonomy order.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CourseDraft {
    #[serde(default)]
    pub id: Option<String>,
    pub full_name: String,
    pub short_name: String,
    pub level: CefrLevel,
    #[serde(default)]
    pub competency_ids: Option<Vec<String>>,
    #[serde(default)]
    pub kind: Option<CompetencyKind>,
}

/// Competencies in insertion order with an id index.
#[derive(Debug, Clone, Default)]
pub struct Taxonomy {
    items: Vec<Competency>,
    by_id: HashMap<String, usize>,
}

impl PartialEq for Taxonomy {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl Taxonomy {
    pub fn from_competencies(items: Vec<Competency>) -> Result<Self> {
        let mut t = Taxonomy::default();
        for c in items {
            c.validate()?;
            if t.by_id.contains_key(&c.id) {
                return Err(Error::DuplicateSlugConflict(c.id));
            }
            t.push(c);
        }
        Ok(t)
    }

    fn push(&mut self, c: Competency) {
        self.by_id.insert(c.id.clone(), self.items.len());
        self.items.push(c);
    }

    pub fn get(&self, id: &str) -> Option<&Competency> {
        self.by_id.get(id).map(|&i| &self.items[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Competency> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn at_level(&self, level: CefrLevel) -> impl Iterator<Item = &Competency> {
        self.items.iter().filter(move |c| c.level == level)
    }

    pub fn by_level_and_kind(
        &self,
        level: CefrLevel,
        kind: CompetencyKind,
    ) -> impl Iterator<Item = &Competency> {
        self.items
            .iter()
            .filter(move |c| c.level == level && c.kind == kind)
    }

    /// Adds `c` unless an identical entry exists. Returns whether it was added.
    pub fn insert(&mut self, c: Competency) -> Result<bool> {
        c.validate()?;
        match self.get(&c.id) {
            Some(existing) if existing.same_content(&c) => Ok(false),
            Some(_) => Err(Error::DuplicateSlugConflict(c.id)),
            None => {
                self.push(c);
                Ok(true)
            }
        }
    }
}

/// A student together with their full assessment history, oldest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dossier {
    pub student: Student,
    pub history: Vec<Assessment>,
}

#[derive(Debug, Clone)]
pub struct Store {
    taxonomy: Taxonomy,
    students: BTreeMap<String, Student>,
    courses: BTreeMap<String, Course>,
    assessments: Vec<Assessment>,
    by_pair: HashMap<(String, String), Vec<usize>>,
    clock: Arc<dyn Clock>,
}

/// Observable state only; the index and the clock are not compared.
impl PartialEq for Store {
    fn eq(&self, other: &Self) -> bool {
        self.taxonomy == other.taxonomy
            && self.students == other.students
            && self.courses == other.courses
            && self.assessments == other.assessments
    }
}

impl Default for Store {
    fn default() -> Self {
        Store::new()
    }
}

impl Store {
    pub fn new() -> Self {
        Store::with_clock(Arc::new(SystemClock))
    }

    pub fn with_clock(clock: Arc<dyn Clock>) -> Self {
        Store {
            taxonomy: Taxonomy::default(),
            students: BTreeMap::new(),
            courses: BTreeMap::new(),
            assessments: Vec::new(),
            by_pair: HashMap::new(),
            clock,
        }
    }

    pub fn set_clock(&mut self, clock: Arc<dyn Clock>) {
        self.clock = clock;
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    pub(crate) fn now(&self) -> DateTime<Utc> {
        truncate_millis(self.clock.now())
    }

    // ---- read side ----

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn competency(&self, id: &str) -> Result<&Competency> {
        self.taxonomy
            .get(id)
            .ok_or_else(|| Error::UnknownCompetency(id.to_string()))
    }

    pub fn student(&self, id: &str) -> Result<&Student> {
        self.students
            .get(id)
            .ok_or_else(|| Error::UnknownStudent(id.to_string()))
    }

    pub fn student_by_email(&self, email: &str) -> Option<&Student> {
        self.students.values().find(|s| s.email == email)
    }

    pub fn course(&self, id: &str) -> Result<&Course> {
        self.courses
            .get(id)
            .ok_or_else(|| Error::UnknownCourse(id.to_string()))
    }

    pub fn course_by_short_name(&self, short_name: &str) -> Option<&Course> {
        self.courses.values().find(|c| c.short_name == short_name)
    }

    /// Students ordered by surname, then first name.
    pub fn students(&self) -> Vec<&Student> {
        let mut v: Vec<_> = self.students.values().collect();
        v.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        v
    }

    pub fn courses(&self) -> impl Iterator<Item = &Course> {
        self.courses.values()
    }

    /// Enrolled students of a course in roster display order.
    pub fn roster(&self, course_id: &str) -> Result<Vec<&Student>> {
        let course = self.course(course_id)?;
        let mut v: Vec<_> = course
            .roster
            .iter()
            .filter_map(|id| self.students.get(id))
            .collect();
        v.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Ok(v)
    }

    /// Competencies of a course, in the course's column order.
    pub fn course_competencies(&self, course_id: &str) -> Result<Vec<&Competency>> {
        let course = self.course(course_id)?;
        course
            .competency_ids
            .iter()
            .map(|id| self.competency(id))
            .collect()
    }

    /// Every stored assessment in insertion order.
    pub fn assessments(&self) -> &[Assessment] {
        &self.assessments
    }

    /// History of one pair, oldest first.
    pub fn history(&self, student_id: &str, competency_id: &str) -> Vec<&Assessment> {
        let mut v: Vec<_> = self
            .pair_indices(student_id, competency_id)
            .iter()
            .map(|&i| &self.assessments[i])
            .collect();
        v.sort_by_key(|a| a.precedence());
        v
    }

    fn pair_indices(&self, student_id: &str, competency_id: &str) -> &[usize] {
        self.by_pair
            .get(&(student_id.to_string(), competency_id.to_string()))
            .map_or(&[], Vec::as_slice)
    }

    fn winning(&self, student_id: &str, competency_id: &str) -> Option<&Assessment> {
        self.pair_indices(student_id, competency_id)
            .iter()
            .map(|&i| &self.assessments[i])
            .max_by_key(|a| a.precedence())
    }

    pub fn current_rating(&self, student_id: &str, competency_id: &str) -> Result<Rating> {
        self.student(student_id)?;
        Ok(self.rating_unchecked(student_id, competency_id))
    }

    pub(crate) fn rating_unchecked(&self, student_id: &str, competency_id: &str) -> Rating {
        self.winning(student_id, competency_id).map(|a| a.score).into()
    }

    /// Feedback from the most recent assessment of the pair that carries any.
    pub fn latest_feedback(&self, student_id: &str, competency_id: &str) -> Option<&str> {
        self.pair_indices(student_id, competency_id)
            .iter()
            .map(|&i| &self.assessments[i])
            .filter(|a| a.feedback.as_deref().is_some_and(|f| !f.is_empty()))
            .max_by_key(|a| a.precedence())
            .and_then(|a| a.feedback.as_deref())
    }

    pub fn dossier(&self, student_id: &str) -> Result<Dossier> {
        let student = self.student(student_id)?.clone();
        let mut history: Vec<_> = self
            .assessments
            .iter()
            .filter(|a| a.student_id == student_id)
            .cloned()
            .collect();
        history.sort_by_key(|a| a.precedence());
        Ok(Dossier { student, history })
    }

    // ---- write side ----

    pub fn add_student(&mut self, student: Student) -> Result<&Student> {
        student.validate()?;
        if self.students.contains_key(&student.id) {
            return Err(Error::DuplicateStudent(student.id));
        }
        let id = student.id.clone();
        Ok(self.students.entry(id).or_insert(student))
    }

    pub fn create_course(&mut self, draft: CourseDraft) -> Result<&Course> {
        if draft.full_name.trim().is_empty() || draft.short_name.trim().is_empty() {
            return Err(Error::Invalid("course names must not be empty".into()));
        }
        let id = match draft.id {
            Some(id) if !id.trim().is_empty() => id,
            Some(_) => return Err(Error::Invalid("course id is empty".into())),
            None => {
                let base = slugify(&draft.short_name);
                if base.is_empty() {
                    return Err(Error::Invalid("cannot derive a course id".into()));
                }
                base
            }
        };
        if self.courses.contains_key(&id) {
            return Err(Error::DuplicateCourse(id));
        }
        if self.course_by_short_name(&draft.short_name).is_some() {
            return Err(Error::DuplicateShortName(draft.short_name));
        }
        let competency_ids = match draft.competency_ids {
            Some(ids) => {
                for cid in &ids {
                    self.check_course_competency(&id, draft.level, cid)?;
                }
                let mut seen = BTreeSet::new();
                ids.into_iter().filter(|c| seen.insert(c.clone())).collect()
            }
            None => self
                .taxonomy
                .at_level(draft.level)
                .filter(|c| c.scope == CompetencyScope::Standard)
                .filter(|c| draft.kind.is_none_or(|k| c.kind == k))
                .map(|c| c.id.clone())
                .collect(),
        };
        let course = Course {
            id: id.clone(),
            full_name: draft.full_name,
            short_name: draft.short_name,
            level: draft.level,
            competency_ids,
            roster: BTreeSet::new(),
        };
        Ok(self.courses.entry(id).or_insert(course))
    }

    fn check_course_competency(&self, course_id: &str, level: CefrLevel, cid: &str) -> Result<()> {
        let c = self.competency(cid)?;
        if c.level != level {
            return Err(Error::Invalid(format!(
                "competency {cid:?} is {} but the course is {level}",
                c.level
            )));
        }
        if let CompetencyScope::Custom(owner) = &c.scope {
            if owner != course_id {
                return Err(Error::Invalid(format!(
                    "competency {cid:?} is custom to course {owner:?}"
                )));
            }
        }
        Ok(())
    }

    /// Appends competencies to a course's column list, skipping ones already there.
    pub fn attach_competencies(&mut self, course_id: &str, ids: &[String]) -> Result<usize> {
        let level = self.course(course_id)?.level;
        for cid in ids {
            self.check_course_competency(course_id, level, cid)?;
        }
        let course = self.courses.get_mut(course_id).expect("checked above");
        let mut added = 0;
        for cid in ids {
            if !course.has_competency(cid) {
                course.competency_ids.push(cid.clone());
                added += 1;
            }
        }
        Ok(added)
    }

    pub fn enroll(&mut self, course_id: &str, student_id: &str) -> Result<()> {
        self.course(course_id)?;
        self.student(student_id)?;
        self.courses
            .get_mut(course_id)
            .expect("checked above")
            .roster
            .insert(student_id.to_string());
        Ok(())
    }

    /// Removes roster membership only; assessment history is untouched.
    pub fn unenroll(&mut self, course_id: &str, student_id: &str) -> Result<()> {
        self.course(course_id)?;
        self.student(student_id)?;
        self.courses
            .get_mut(course_id)
            .expect("checked above")
            .roster
            .remove(student_id);
        Ok(())
    }

    pub fn rename_course(&mut self, course_id: &str, full_name: &str, short_name: &str) -> Result<()> {
        self.course(course_id)?;
        if full_name.trim().is_empty() || short_name.trim().is_empty() {
            return Err(Error::Invalid("course names must not be empty".into()));
        }
        if let Some(other) = self.course_by_short_name(short_name) {
            if other.id != course_id {
                return Err(Error::DuplicateShortName(short_name.to_string()));
            }
        }
        let course = self.courses.get_mut(course_id).expect("checked above");
        course.full_name = full_name.to_string();
        course.short_name = short_name.to_string();
        Ok(())
    }

    /// Records a new assessment stamped with the store clock.
    pub fn record_assessment(
        &mut self,
        student_id: &str,
        competency_id: &str,
        score: Score,
        feedback: Option<String>,
        assessor: &str,
    ) -> Result<Assessment> {
        self.student(student_id)?;
        self.competency(competency_id)?;
        let enrolled = self
            .courses
            .values()
            .any(|c| c.is_enrolled(student_id) && c.has_competency(competency_id));
        if !enrolled {
            return Err(Error::StudentNotEnrolled {
                student: student_id.to_string(),
                context: format!("any course tracking {competency_id:?}"),
            });
        }
        let assessment = Assessment {
            student_id: student_id.to_string(),
            competency_id: competency_id.to_string(),
            score,
            feedback: feedback.filter(|f| !f.is_empty()),
            assessor: assessor.to_string(),
            timestamp: self.now(),
            source: AssessmentSource::Local,
        };
        self.push_assessment(assessment.clone());
        Ok(assessment)
    }

    /// Appends an already-timestamped record (used by archive import).
    /// Referential integrity is checked; enrollment is not.
    pub(crate) fn append_assessment(&mut self, assessment: Assessment) -> Result<()> {
        self.student(&assessment.student_id)?;
        self.competency(&assessment.competency_id)?;
        self.push_assessment(assessment);
        Ok(())
    }

    pub(crate) fn contains_record(&self, a: &Assessment) -> bool {
        self.pair_indices(&a.student_id, &a.competency_id)
            .iter()
            .any(|&i| self.assessments[i].same_record(a))
    }

    fn push_assessment(&mut self, a: Assessment) {
        self.by_pair
            .entry((a.student_id.clone(), a.competency_id.clone()))
            .or_default()
            .push(self.assessments.len());
        self.assessments.push(a);
    }

    pub(crate) fn taxonomy_mut(&mut self) -> &mut Taxonomy {
        &mut self.taxonomy
    }

    pub(crate) fn course_mut(&mut self, id: &str) -> Result<&mut Course> {
        self.courses
            .get_mut(id)
            .ok_or_else(|| Error::UnknownCourse(id.to_string()))
    }

    pub(crate) fn insert_course(&mut self, course: Course) {
        self.courses.insert(course.id.clone(), course);
    }

    // ---- persistence ----

    fn body(&self) -> StoreBody {
        StoreBody {
            taxonomy: self.taxonomy.items.clone(),
            students: self.students.values().cloned().collect(),
            courses: self.courses.values().cloned().collect(),
            assessments: self.assessments.clone(),
        }
    }

    fn from_body(body: StoreBody, clock: Arc<dyn Clock>) -> Result<Self> {
        let corrupt = |e: Error| Error::CorruptStore(e.to_string());
        let mut store = Store::with_clock(clock);
        store.taxonomy = Taxonomy::from_competencies(body.taxonomy).map_err(corrupt)?;
        for s in body.students {
            store.add_student(s).map_err(corrupt)?;
        }
        for c in body.courses {
            for cid in &c.competency_ids {
                store.competency(cid).map_err(corrupt)?;
            }
            for sid in &c.roster {
                store.student(sid).map_err(corrupt)?;
            }
            if store.courses.contains_key(&c.id) {
                return Err(Error::CorruptStore(format!("duplicate course id {:?}", c.id)));
            }
            store.insert_course(c);
        }
        for a in body.assessments {
            store.append_assessment(a).map_err(corrupt)?;
        }
        Ok(store)
    }

    /// Serializes to the versioned, checksummed `store.json` document.
    pub fn to_json_bytes(&self) -> Result<Vec<u8>> {
        let body = self.body();
        let checksum = body_checksum(&body)?;
        let doc = StoreDocument {
            format_version: STORE_FORMAT_VERSION,
            checksum,
            body,
        };
        let mut out = serde_json::to_vec_pretty(&doc)
            .map_err(|e| Error::CorruptStore(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_json_bytes(bytes: &[u8], clock: Arc<dyn Clock>) -> Result<Self> {
        let doc: StoreDocument = serde_json::from_slice(bytes)
            .map_err(|e| Error::CorruptStore(format!("unreadable store: {e}")))?;
        if doc.format_version != STORE_FORMAT_VERSION {
            return Err(Error::CorruptStore(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        let expected = body_checksum(&doc.body)?;
        if expected != doc.checksum {
            return Err(Error::CorruptStore("checksum mismatch".into()));
        }
        Store::from_body(doc.body, clock)
    }

    /// Writes atomically: temp file in the same directory, fsync, rename.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let bytes = self.to_json_bytes()?;
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
        if let Some(dir) = dir {
            fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("json.tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Store::load_with_clock(path, Arc::new(SystemClock))
    }

    pub fn load_with_clock(path: impl AsRef<Path>, clock: Arc<dyn Clock>) -> Result<Self> {
        let bytes = fs::read(path)?;
        Store::from_json_bytes(&bytes, clock)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct StoreBody {
    taxonomy: Vec<Competency>,
    students: Vec<Student>,
    courses: Vec<Course>,
    assessments: Vec<Assessment>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StoreDocument {
    format_version: u32,
    checksum: String,
    #[serde(flatten)]
    body: StoreBody,
}

fn body_checksum(body: &StoreBody) -> Result<String> {
    let canonical = serde_json::to_vec(body).map_err(|e| Error::CorruptStore(e.to_string()))?;
    Ok(format!("sha256:{}", hex::encode(Sha256::digest(&canonical))))
}

/// Single-writer handle over a store.
///
/// Readers take an `Arc` snapshot and never observe a half-applied mutation.
/// Writers are serialized; each mutation runs against a private copy that is
/// persisted (when a path is configured) and then published. A failed
/// mutation publishes nothing.
#[derive(Debug)]
pub struct SharedStore {
    current: RwLock<Arc<Store>>,
    path: Mutex<Option<PathBuf>>,
}

impl SharedStore {
    pub fn in_memory(store: Store) -> Self {
        SharedStore {
            current: RwLock::new(Arc::new(store)),
            path: Mutex::new(None),
        }
    }

    pub fn persistent(store: Store, path: impl Into<PathBuf>) -> Self {
        SharedStore {
            current: RwLock::new(Arc::new(store)),
            path: Mutex::new(Some(path.into())),
        }
    }

    /// Loads `path` if it exists, otherwise starts empty.
    pub fn open(path: impl Into<PathBuf>, clock: Arc<dyn Clock>) -> Result<Self> {
        let path = path.into();
        let store = if path.exists() {
            Store::load_with_clock(&path, clock)?
        } else {
            Store::with_clock(clock)
        };
        Ok(SharedStore::persistent(store, path))
    }

    pub fn snapshot(&self) -> Arc<Store> {
        self.current
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .clone()
    }

    pub fn mutate<T>(&self, f: impl FnOnce(&mut Store) -> Result<T>) -> Result<T> {
        let path = self.path.lock().unwrap_or_else(|e| e.into_inner());
        let mut next = Store::clone(&self.snapshot());
        let out = f(&mut next)?;
        if let Some(path) = path.as_ref() {
            next.save(path)?;
        }
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok(out)
    }

    /// Persists the current snapshot (no-op for in-memory stores).
    pub fn flush(&self) -> Result<()> {
        let path = self.path.lock().unwrap_or_else(|e| e.into_inner());
        match path.as_ref() {
            Some(p) => self.snapshot().save(p),
            None => Ok(()),
        }
    }
}

/// Exclusive hold on a data directory. Released on drop.
#[derive(Debug)]
pub struct DataDirLock {
    _file: fs::File,
    dir: PathBuf,
}

impl DataDirLock {
    /// Creates `dir` if needed and takes its lock without waiting.
    pub fn acquire(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let file = fs::OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(dir.join(LOCK_FILE_NAME))?;
        match file.try_lock() {
            Ok(()) => Ok(DataDirLock {
                _file: file,
                dir: dir.to_path_buf(),
            }),
            Err(fs::TryLockError::WouldBlock) => Err(Error::StoreLocked),
            Err(fs::TryLockError::Error(e)) => Err(e.into()),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn store_path(&self) -> PathBuf {
        self.dir.join(STORE_FILE_NAME)
    }
}
