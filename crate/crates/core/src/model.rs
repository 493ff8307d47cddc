//! Domain values: CEFR levels, competencies, the five-point scale, students
//! and placement tables. Everything here is an immutable value.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Common European Framework proficiency level, ordered A1 < A2 < ... < C2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub enum CefrLevel {
    #[default]
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
}

impl CefrLevel {
    pub const ALL: [CefrLevel; 6] = [
        CefrLevel::A1,
        CefrLevel::A2,
        CefrLevel::B1,
        CefrLevel::B2,
        CefrLevel::C1,
        CefrLevel::C2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CefrLevel::A1 => "A1",
            CefrLevel::A2 => "A2",
            CefrLevel::B1 => "B1",
            CefrLevel::B2 => "B2",
            CefrLevel::C1 => "C1",
            CefrLevel::C2 => "C2",
        }
    }

    /// The level a learner moves on to once this one is complete. `None` for C2.
    pub fn next(self) -> Option<CefrLevel> {
        let idx = Self::ALL.iter().position(|l| *l == self)?;
        Self::ALL.get(idx + 1).copied()
    }

    pub fn previous(self) -> Option<CefrLevel> {
        let idx = Self::ALL.iter().position(|l| *l == self)?;
        idx.checked_sub(1).map(|i| Self::ALL[i])
    }
}

impl fmt::Display for CefrLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CefrLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_level(s)
    }
}

/// Case-insensitive parse of one of the six level symbols.
pub fn parse_level(text: &str) -> Result<CefrLevel> {
    CefrLevel::ALL
        .into_iter()
        .find(|l| l.as_str().eq_ignore_ascii_case(text.trim()))
        .ok_or_else(|| Error::UnknownLevel(text.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompetencyKind {
    Grammar,
    Function,
}

impl CompetencyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CompetencyKind::Grammar => "grammar",
            CompetencyKind::Function => "function",
        }
    }
}

impl fmt::Display for CompetencyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CompetencyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "grammar" => Ok(CompetencyKind::Grammar),
            "function" | "functions" => Ok(CompetencyKind::Function),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

/// Where a competency is visible: to every course, or only to the course it
/// was imported for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CompetencyScope {
    #[default]
    Standard,
    Custom(String),
}

/// One trackable skill, e.g. "B1 Modals: Past".
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Competency {
    pub id: String,
    pub level: CefrLevel,
    pub kind: CompetencyKind,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub scope: CompetencyScope,
}

impl Competency {
    pub fn new(
        id: impl Into<String>,
        level: CefrLevel,
        kind: CompetencyKind,
        title: impl Into<String>,
    ) -> Result<Self> {
        let c = Competency {
            id: id.into(),
            level,
            kind,
            title: title.into(),
            description: None,
            scope: CompetencyScope::Standard,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::Invalid("competency id is empty".into()));
        }
        if self.title.trim().is_empty() {
            return Err(Error::Invalid(format!("competency {:?} has an empty title", self.id)));
        }
        Ok(())
    }

    /// Equality of everything an outcomes file describes. Scope is ignored.
    pub fn same_content(&self, other: &Competency) -> bool {
        self.id == other.id
            && self.level == other.level
            && self.kind == other.kind
            && self.title == other.title
            && self.description == other.description
    }
}

/// A point on the five-point performance scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Score(u8);

impl Score {
    pub const MIN: Score = Score(1);
    pub const MAX: Score = Score(5);

    pub fn new(value: i64) -> Result<Self> {
        if (1..=5).contains(&value) {
            Ok(Score(value as u8))
        } else {
            Err(Error::ScoreOutOfRange(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Score> {
        (1..=5).map(Score)
    }

    pub fn label(self) -> &'static str {
        score_label(self)
    }
}

impl TryFrom<i64> for Score {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        Score::new(value)
    }
}

impl From<Score> for u8 {
    fn from(s: Score) -> u8 {
        s.0
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Score {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: i64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("score {s:?} is not an integer")))?;
        Score::new(v)
    }
}

pub fn score_label(score: Score) -> &'static str {
    match score.0 {
        5 => "mastery",
        4 => "acceptable performance",
        3 => "working performance",
        2 => "limited performance",
        _ => "minimal performance",
    }
}

/// The value shown in a grade cell: a score, or a hyphen when nothing has
/// been recorded for the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Rating {
    Recorded(Score),
    #[default]
    Unrecorded,
}

impl Rating {
    pub fn score(self) -> Option<Score> {
        match self {
            Rating::Recorded(s) => Some(s),
            Rating::Unrecorded => None,
        }
    }

    pub fn is_recorded(self) -> bool {
        matches!(self, Rating::Recorded(_))
    }
}

impl From<Option<Score>> for Rating {
    fn from(s: Option<Score>) -> Self {
        s.map_or(Rating::Unrecorded, Rating::Recorded)
    }
}

impl From<Score> for Rating {
    fn from(s: Score) -> Self {
        Rating::Recorded(s)
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rating::Recorded(s) => write!(f, "{s}"),
            Rating::Unrecorded => f.write_str("-"),
        }
    }
}

// Unrecorded travels as JSON null.
impl Serialize for Rating {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.score().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rating {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Option::<Score>::deserialize(deserializer)?.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Student {
    pub id: String,
    pub surname: String,
    pub first_name: String,
    pub email: String,
}

impl Student {
    pub fn new(
        id: impl Into<String>,
        surname: impl Into<String>,
        first_name: impl Into<String>,
        email: impl Into<String>,
    ) -> Result<Self> {
        let s = Student {
            id: id.into(),
            surname: surname.into(),
            first_name: first_name.into(),
            email: email.into(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::Invalid("student id is empty".into()));
        }
        if self.surname.trim().is_empty() && self.first_name.trim().is_empty() {
            return Err(Error::Invalid(format!("student {:?} has no name", self.id)));
        }
        let plausible = self
            .email
            .split_once('@')
            .is_some_and(|(user, host)| !user.is_empty() && !host.is_empty());
        if !plausible {
            return Err(Error::Invalid(format!("email {:?} is not plausible", self.email)));
        }
        Ok(())
    }

    pub fn full_name(&self) -> String {
        match (self.first_name.is_empty(), self.surname.is_empty()) {
            (true, _) => self.surname.clone(),
            (_, true) => self.first_name.clone(),
            _ => format!("{} {}", self.first_name, self.surname),
        }
    }

    /// Roster order: surname, then first name, then id.
    pub fn sort_key(&self) -> (&str, &str, &str) {
        (&self.surname, &self.first_name, &self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementEntry {
    #[serde(rename = "test")]
    pub test_name: String,
    #[serde(rename = "min")]
    pub min_score: f64,
    #[serde(rename = "max")]
    pub max_score: f64,
    pub level: CefrLevel,
}

/// Score bands mapping external test results onto CEFR levels. Bounds are
/// inclusive; bands for the same test must not overlap.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PlacementTable {
    entries: Vec<PlacementEntry>,
}

impl PlacementTable {
    pub fn new(entries: Vec<PlacementEntry>) -> Result<Self> {
        for e in &entries {
            if e.test_name.trim().is_empty() {
                return Err(Error::InvalidPlacementTable("empty test name".into()));
            }
            if !e.min_score.is_finite() || !e.max_score.is_finite() {
                return Err(Error::InvalidPlacementTable(format!(
                    "non-finite bound for test {:?}",
                    e.test_name
                )));
            }
            if e.min_score > e.max_score {
                return Err(Error::InvalidPlacementTable(format!(
                    "min {} > max {} for test {:?}",
                    e.min_score, e.max_score, e.test_name
                )));
            }
        }
        for (i, a) in entries.iter().enumerate() {
            for b in &entries[i + 1..] {
                if a.test_name == b.test_name
                    && a.min_score <= b.max_score
                    && b.min_score <= a.max_score
                {
                    return Err(Error::InvalidPlacementTable(format!(
                        "ranges [{}, {}] and [{}, {}] overlap for test {:?}",
                        a.min_score, a.max_score, b.min_score, b.max_score, a.test_name
                    )));
                }
            }
        }
        Ok(PlacementTable { entries })
    }

    /// Reads the `test,min,max,level` CSV format.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::InvalidPlacementTable(e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["test", "min", "max", "level"] {
            return Err(Error::InvalidPlacementTable(format!(
                "expected header test,min,max,level, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for row in rdr.deserialize::<PlacementEntry>() {
            entries.push(row.map_err(|e| Error::InvalidPlacementTable(e.to_string()))?);
        }
        Self::new(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn entries(&self) -> &[PlacementEntry] {
        &self.entries
    }

    pub fn place(&self, test_name: &str, raw_score: f64) -> Result<CefrLevel> {
        place_student(test_name, raw_score, self)
    }
}

pub fn place_student(test_name: &str, raw_score: f64, table: &PlacementTable) -> Result<CefrLevel> {
    let mut known = false;
    for e in table.entries.iter().filter(|e| e.test_name == test_name) {
        known = true;
        if e.min_score <= raw_score && raw_score <= e.max_score {
            return Ok(e.level);
        }
    }
    if known {
        Err(Error::PlacementScoreOutOfRange(raw_score))
    } else {
        Err(Error::UnknownTest(test_name.to_string()))
    }
}

/// Lowercase ASCII slug: runs of non-alphanumerics collapse into one `-`.
pub fn slugify(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}
