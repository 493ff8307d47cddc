//! The two places a command can run: a local data directory or a server.

use std::path::{Path, PathBuf};
use std::time::Duration;

use comptrack_core::portability::import_decoded;
use comptrack_core::store::STORE_FILE_NAME;
use comptrack_core::{
    export_archive, export_dossier, gap_analysis, grader_report, import_outcomes_csv, level_checklist,
    user_report, Archive, Assessment, CefrLevel, Competency, CompetencyKind, Course, CourseDraft, DataDirLock,
    Error, GapAnalysis, GraderReport, ImportDestination, ImportOutcome, ImportScope, LevelChecklist,
    PlacementTable, Rating, Score, Store, Student, UserReport,
};
use reqwest::blocking::{multipart, Client, RequestBuilder, Response};
use reqwest::Url;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Graded {
    pub assessment: Assessment,
    pub current_rating: Rating,
    pub history_length: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Status {
    pub status: String,
    pub competencies: usize,
    pub students: usize,
    pub courses: usize,
    pub assessments: usize,
}

pub trait Backend {
    fn status(&self) -> Result<Status>;
    fn import_outcomes(&self, csv: Vec<u8>, scope: ImportScope) -> Result<Vec<Competency>>;
    fn competencies(&self, level: Option<CefrLevel>, kind: Option<CompetencyKind>) -> Result<Vec<Competency>>;
    fn add_student(&self, student: Student) -> Result<Student>;
    fn students(&self) -> Result<Vec<Student>>;
    fn create_course(&self, draft: CourseDraft) -> Result<Course>;
    fn courses(&self) -> Result<Vec<Course>>;
    fn enroll(&self, course: &str, student: &str) -> Result<Course>;
    fn unenroll(&self, course: &str, student: &str) -> Result<Course>;
    fn rename(&self, course: &str, full_name: Option<String>, short_name: Option<String>) -> Result<Course>;
    fn grade(&self, student: &str, competency: &str, score: i64, feedback: Option<String>, assessor: &str)
        -> Result<Graded>;
    fn grader_report(&self, course: &str) -> Result<GraderReport>;
    fn user_report(&self, course: &str, student: &str) -> Result<UserReport>;
    fn gaps(&self, course: &str, competency: &str) -> Result<GapAnalysis>;
    fn checklist(&self, student: &str, level: CefrLevel, threshold: Option<Score>) -> Result<LevelChecklist>;
    fn place(&self, test: &str, score: f64) -> Result<CefrLevel>;
    /// Returns the suggested file name and the archive bytes.
    fn export(&self, course: &str, student: Option<&str>) -> Result<(String, Vec<u8>)>;
    fn import(&self, archive: Vec<u8>, dest: &ImportDestination) -> Result<ImportOutcome>;
}

/// Works on `<dir>/store.json`. Mutations hold the directory lock for their
/// whole read-modify-write; reads rely on the store's atomic replace.
pub struct Local {
    dir: PathBuf,
    placement: Option<PathBuf>,
}

impl Local {
    pub fn new(dir: impl Into<PathBuf>, placement: Option<PathBuf>) -> Self {
        Local {
            dir: dir.into(),
            placement,
        }
    }

    fn load(path: &Path) -> Result<Store> {
        if path.exists() {
            Ok(Store::load(path)?)
        } else {
            Ok(Store::new())
        }
    }

    fn read(&self) -> Result<Store> {
        Self::load(&self.dir.join(STORE_FILE_NAME))
    }

    fn write<T>(&self, f: impl FnOnce(&mut Store) -> comptrack_core::Result<T>) -> Result<T> {
        let lock = DataDirLock::acquire(&self.dir)?;
        let mut store = Self::load(&lock.store_path())?;
        let out = f(&mut store)?;
        store.save(lock.store_path())?;
        Ok(out)
    }
}

impl Backend for Local {
    fn status(&self) -> Result<Status> {
        let s = self.read()?;
        Ok(Status {
            status: "ok".into(),
            competencies: s.taxonomy().len(),
            students: s.students().len(),
            courses: s.courses().count(),
            assessments: s.assessments().len(),
        })
    }

    fn import_outcomes(&self, csv: Vec<u8>, scope: ImportScope) -> Result<Vec<Competency>> {
        self.write(|s| import_outcomes_csv(s, &csv, &scope))
    }

    fn competencies(&self, level: Option<CefrLevel>, kind: Option<CompetencyKind>) -> Result<Vec<Competency>> {
        let s = self.read()?;
        Ok(s.taxonomy()
            .iter()
            .filter(|c| level.is_none_or(|l| c.level == l))
            .filter(|c| kind.is_none_or(|k| c.kind == k))
            .cloned()
            .collect())
    }

    fn add_student(&self, student: Student) -> Result<Student> {
        self.write(|s| s.add_student(student).cloned())
    }

    fn students(&self) -> Result<Vec<Student>> {
        Ok(self.read()?.students().into_iter().cloned().collect())
    }

    fn create_course(&self, draft: CourseDraft) -> Result<Course> {
        self.write(|s| s.create_course(draft).cloned())
    }

    fn courses(&self) -> Result<Vec<Course>> {
        Ok(self.read()?.courses().cloned().collect())
    }

    fn enroll(&self, course: &str, student: &str) -> Result<Course> {
        self.write(|s| {
            s.enroll(course, student)?;
            s.course(course).cloned()
        })
    }

    fn unenroll(&self, course: &str, student: &str) -> Result<Course> {
        self.write(|s| {
            s.unenroll(course, student)?;
            s.course(course).cloned()
        })
    }

    fn rename(&self, course: &str, full_name: Option<String>, short_name: Option<String>) -> Result<Course> {
        self.write(|s| {
            let current = s.course(course)?;
            let full = full_name.unwrap_or_else(|| current.full_name.clone());
            let short = short_name.unwrap_or_else(|| current.short_name.clone());
            s.rename_course(course, &full, &short)?;
            s.course(course).cloned()
        })
    }

    fn grade(
        &self,
        student: &str,
        competency: &str,
        score: i64,
        feedback: Option<String>,
        assessor: &str,
    ) -> Result<Graded> {
        let score = Score::new(score)?;
        self.write(|s| {
            let assessment = s.record_assessment(student, competency, score, feedback, assessor)?;
            Ok(Graded {
                assessment,
                current_rating: s.current_rating(student, competency)?,
                history_length: s.history(student, competency).len(),
            })
        })
    }

    fn grader_report(&self, course: &str) -> Result<GraderReport> {
        Ok(grader_report(&self.read()?, course)?)
    }

    fn user_report(&self, course: &str, student: &str) -> Result<UserReport> {
        Ok(user_report(&self.read()?, student, course)?)
    }

    fn gaps(&self, course: &str, competency: &str) -> Result<GapAnalysis> {
        Ok(gap_analysis(&self.read()?, course, competency)?)
    }

    fn checklist(&self, student: &str, level: CefrLevel, threshold: Option<Score>) -> Result<LevelChecklist> {
        let threshold = threshold.unwrap_or(Score::new(4)?);
        Ok(level_checklist(&self.read()?, student, level, threshold)?)
    }

    fn place(&self, test: &str, score: f64) -> Result<CefrLevel> {
        let path = self.placement.as_ref().ok_or(Error::PlacementNotConfigured)?;
        Ok(PlacementTable::load(path)?.place(test, score)?)
    }

    fn export(&self, course: &str, student: Option<&str>) -> Result<(String, Vec<u8>)> {
        let store = self.read()?;
        let archive = match student {
            Some(sid) => export_dossier(&store, course, sid)?,
            None => export_archive(&store, course)?,
        };
        Ok((archive.file_name(), archive.to_bytes()?))
    }

    fn import(&self, archive: Vec<u8>, dest: &ImportDestination) -> Result<ImportOutcome> {
        let archive = Archive::from_bytes(&archive)?;
        self.write(|s| import_decoded(s, &archive, dest))
    }
}

#[derive(Debug, Deserialize)]
struct WireError {
    code: String,
    message: String,
}

#[derive(Debug, Deserialize)]
struct Imported {
    competencies: Vec<Competency>,
}

#[derive(Debug, Deserialize)]
struct Placed {
    level: CefrLevel,
}

/// Talks to a running service.
pub struct Remote {
    base: Url,
    token: Option<String>,
    http: Client,
}

impl Remote {
    pub fn new(server: &str, token: Option<String>) -> Result<Self> {
        let base = Url::parse(server).map_err(|e| CliError::Transport(format!("server URL {server:?}: {e}")))?;
        if base.cannot_be_a_base() {
            return Err(CliError::Transport(format!("server URL {server:?} cannot carry a path")));
        }
        let http = Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| CliError::Transport(e.to_string()))?;
        Ok(Remote {
            base,
            token: token.filter(|t| !t.is_empty()),
            http,
        })
    }

    fn url(&self, segments: &[&str]) -> Url {
        let mut url = self.base.clone();
        {
            let mut path = url.path_segments_mut().expect("checked in new");
            path.pop_if_empty().extend(["api", "v1"]).extend(segments);
        }
        url
    }

    fn send(&self, req: RequestBuilder) -> Result<Response> {
        let req = match &self.token {
            Some(t) => req.bearer_auth(t),
            None => req,
        };
        let res = req.send().map_err(|e| CliError::Transport(e.to_string()))?;
        if res.status().is_success() {
            return Ok(res);
        }
        let status = res.status();
        let text = res.text().unwrap_or_default();
        Err(match serde_json::from_str::<WireError>(&text) {
            Ok(w) => CliError::Remote {
                code: w.code,
                message: w.message,
            },
            Err(_) => CliError::Remote {
                code: format!("http.{}", status.as_u16()),
                message: text,
            },
        })
    }

    fn decode<T: DeserializeOwned>(&self, req: RequestBuilder) -> Result<T> {
        self.send(req)?
            .json()
            .map_err(|e| CliError::Transport(format!("decoding response: {e}")))
    }
}

impl Backend for Remote {
    fn status(&self) -> Result<Status> {
        self.decode(self.http.get(self.url(&["health"])))
    }

    fn import_outcomes(&self, csv: Vec<u8>, scope: ImportScope) -> Result<Vec<Competency>> {
        let mut url = self.url(&["outcomes", "import"]);
        match &scope {
            ImportScope::Standard => url.query_pairs_mut().append_pair("scope", "standard"),
            ImportScope::Custom(course) => url
                .query_pairs_mut()
                .append_pair("scope", "custom")
                .append_pair("course", course),
        };
        let out: Imported = self.decode(self.http.post(url).header("content-type", "text/csv").body(csv))?;
        Ok(out.competencies)
    }

    fn competencies(&self, level: Option<CefrLevel>, kind: Option<CompetencyKind>) -> Result<Vec<Competency>> {
        let mut url = self.url(&["competencies"]);
        if let Some(l) = level {
            url.query_pairs_mut().append_pair("level", l.as_str());
        }
        if let Some(k) = kind {
            url.query_pairs_mut().append_pair("kind", &k.to_string());
        }
        self.decode(self.http.get(url))
    }

    fn add_student(&self, student: Student) -> Result<Student> {
        self.decode(self.http.post(self.url(&["students"])).json(&student))
    }

    fn students(&self) -> Result<Vec<Student>> {
        self.decode(self.http.get(self.url(&["students"])))
    }

    fn create_course(&self, draft: CourseDraft) -> Result<Course> {
        self.decode(self.http.post(self.url(&["courses"])).json(&draft))
    }

    fn courses(&self) -> Result<Vec<Course>> {
        self.decode(self.http.get(self.url(&["courses"])))
    }

    fn enroll(&self, course: &str, student: &str) -> Result<Course> {
        let url = self.url(&["courses", course, "enroll"]);
        self.decode(self.http.post(url).json(&json!({ "student": student })))
    }

    fn unenroll(&self, course: &str, student: &str) -> Result<Course> {
        self.decode(self.http.delete(self.url(&["courses", course, "enroll", student])))
    }

    fn rename(&self, course: &str, full_name: Option<String>, short_name: Option<String>) -> Result<Course> {
        let body = json!({ "full_name": full_name, "short_name": short_name });
        self.decode(self.http.patch(self.url(&["courses", course])).json(&body))
    }

    fn grade(
        &self,
        student: &str,
        competency: &str,
        score: i64,
        feedback: Option<String>,
        assessor: &str,
    ) -> Result<Graded> {
        let body = json!({
            "student": student,
            "competency": competency,
            "score": score,
            "feedback": feedback,
            "assessor": assessor,
        });
        self.decode(self.http.put(self.url(&["grades"])).json(&body))
    }

    fn grader_report(&self, course: &str) -> Result<GraderReport> {
        self.decode(self.http.get(self.url(&["courses", course, "grader-report"])))
    }

    fn user_report(&self, course: &str, student: &str) -> Result<UserReport> {
        let url = self.url(&["courses", course, "students", student, "user-report"]);
        self.decode(self.http.get(url))
    }

    fn gaps(&self, course: &str, competency: &str) -> Result<GapAnalysis> {
        self.decode(self.http.get(self.url(&["courses", course, "gaps", competency])))
    }

    fn checklist(&self, student: &str, level: CefrLevel, threshold: Option<Score>) -> Result<LevelChecklist> {
        let mut url = self.url(&["students", student, "checklist", level.as_str()]);
        if let Some(t) = threshold {
            url.query_pairs_mut().append_pair("threshold", &t.value().to_string());
        }
        self.decode(self.http.get(url))
    }

    fn place(&self, test: &str, score: f64) -> Result<CefrLevel> {
        let body = json!({ "test": test, "score": score });
        let placed: Placed = self.decode(self.http.post(self.url(&["placement"])).json(&body))?;
        Ok(placed.level)
    }

    fn export(&self, course: &str, student: Option<&str>) -> Result<(String, Vec<u8>)> {
        let url = match student {
            Some(sid) => self.url(&["courses", course, "export", sid]),
            None => self.url(&["courses", course, "export"]),
        };
        let res = self.send(self.http.get(url))?;
        let name = res
            .headers()
            .get("content-disposition")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.split("filename=\"").nth(1))
            .and_then(|v| v.split('"').next())
            .map(String::from)
            .unwrap_or_else(|| format!("{course}.ctar"));
        let bytes = res.bytes().map_err(|e| CliError::Transport(e.to_string()))?;
        Ok((name, bytes.to_vec()))
    }

    fn import(&self, archive: Vec<u8>, dest: &ImportDestination) -> Result<ImportOutcome> {
        let file = multipart::Part::bytes(archive)
            .file_name("archive.ctar")
            .mime_str("application/zip")
            .map_err(|e| CliError::Transport(e.to_string()))?;
        let form = multipart::Form::new()
            .text("destination", dest.to_string())
            .part("file", file);
        self.decode(self.http.post(self.url(&["import"])).multipart(form))
    }
}
