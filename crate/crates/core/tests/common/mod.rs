#![allow(dead_code)]

use std::sync::Arc;

use comptrack_core::portability::BUNDLED_OUTCOMES_CSV;
use comptrack_core::{
    import_outcomes_csv, CefrLevel, CompetencyKind, CourseDraft, ImportScope, ManualClock, Score, Store,
    Student,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const START_MS: i64 = 1_371_800_000_000;

/// The seventeen rows of Garcia-Marquez's B1 user report, in display order.
pub const GM_USER_REPORT: [(&str, Option<i64>); 17] = [
    ("B1 Should have, might have/etc.", Some(4)),
    ("B1 Modals: Past", Some(3)),
    ("B1 Need to", Some(4)),
    ("B1 Must/have to/Ought to", Some(4)),
    ("B1 Intensifiers range 3", Some(3)),
    ("B1 Must/can't (deduction)", Some(4)),
    ("B1 Might, may, will, probably", Some(4)),
    ("B1 Modals: Possibility", Some(5)),
    ("B1 Reported speech (range of tenses)", Some(4)),
    ("B1 Simple passive", Some(4)),
    ("B1 Passives", Some(2)),
    ("B1 Extended phrasal verbs", Some(5)),
    (
        "B1 Adverbial phrases of time, place and frequency including word order Adjectives vs adverbs",
        Some(3),
    ),
    ("B1 Second and third conditional", Some(4)),
    ("B1 Adverbial phrases of degree/extent, probability", Some(4)),
    ("B1 Comparative and superlative form of adverbs", None),
    ("B1 Present perfect continuous", None),
];

pub const SHOULD_HAVE: &str = "B1 Should have, might have/etc.";
pub const CONNECTING_WORDS: &str = "B1 Connecting words expressing cause and effect";

/// (id, surname, first name, email, should-have rating, connecting-words rating)
pub type Writer = (&'static str, &'static str, &'static str, &'static str, Option<i64>, Option<i64>);

pub const WRITERS: [Writer; 5] = [
    ("gm", "Garcia-Marquez", "Gabriel", "g@b.com", Some(4), Some(3)),
    ("ag", "Goswami", "Amar", "f@b.com", None, None),
    ("rmr", "Rilke", "Rainer Maria", "A@b.com", Some(5), Some(3)),
    ("ko", "Oe", "Kenzaburo", "e@b.com", None, None),
    ("os", "Sembène", "Ousmane", "c@b.com", Some(1), Some(3)),
];

pub fn score(v: i64) -> Score {
    Score::new(v).unwrap()
}

pub fn clock() -> Arc<ManualClock> {
    Arc::new(ManualClock::starting_at_millis(START_MS, 1_000))
}

pub fn taxonomy_store(clock: Arc<ManualClock>) -> Store {
    let mut s = Store::with_clock(clock);
    import_outcomes_csv(&mut s, BUNDLED_OUTCOMES_CSV.as_bytes(), &ImportScope::Standard).unwrap();
    s
}

pub fn id_of(store: &Store, title: &str) -> String {
    store
        .taxonomy()
        .iter()
        .find(|c| c.title == title)
        .unwrap_or_else(|| panic!("no competency titled {title:?}"))
        .id
        .clone()
}

/// The five-writer B1 class plus Garcia-Marquez's own seventeen-item
/// gradebook, seeded with the ratings shown in the reports.
pub fn writers_class() -> Store {
    let mut s = taxonomy_store(clock());
    s.create_course(CourseDraft {
        id: Some("b1".into()),
        full_name: "CEFR B1 Grammar Competencies".into(),
        short_name: "CEFR B1 Comp".into(),
        level: CefrLevel::B1,
        kind: Some(CompetencyKind::Grammar),
        ..Default::default()
    })
    .unwrap();
    let gm_ids: Vec<String> = GM_USER_REPORT.iter().map(|(t, _)| id_of(&s, t)).collect();
    s.create_course(CourseDraft {
        id: Some("gm-b1".into()),
        full_name: "G Garcia-Marquez CEFR B1 Grammar Competencies".into(),
        short_name: "G Garcia-Marquez CEFR B1 Comp".into(),
        level: CefrLevel::B1,
        competency_ids: Some(gm_ids.clone()),
        ..Default::default()
    })
    .unwrap();
    for (id, sur, first, email, _, _) in WRITERS {
        s.add_student(Student::new(id, sur, first, email).unwrap()).unwrap();
        s.enroll("b1", id).unwrap();
    }
    s.enroll("gm-b1", "gm").unwrap();

    for ((_, rating), cid) in GM_USER_REPORT.iter().zip(&gm_ids) {
        if let Some(v) = rating {
            s.record_assessment("gm", cid, score(*v), None, "rb").unwrap();
        }
    }
    let connecting = id_of(&s, CONNECTING_WORDS);
    let should = id_of(&s, SHOULD_HAVE);
    for (id, _, _, _, sh, cw) in WRITERS {
        // Garcia-Marquez's should-have rating is already part of his report
        if let (Some(v), true) = (sh, id != "gm") {
            s.record_assessment(id, &should, score(v), None, "rb").unwrap();
        }
        if let Some(v) = cw {
            s.record_assessment(id, &connecting, score(v), None, "rb").unwrap();
        }
    }
    s
}

/// Parameters of one randomized installation.
pub struct RandomCourse {
    pub store: Store,
    pub course_id: String,
    pub clock: Arc<ManualClock>,
}

pub fn random_level(rng: &mut ChaCha8Rng) -> CefrLevel {
    CefrLevel::ALL[rng.gen_range(0..6)]
}

pub fn random_competencies(store: &Store, rng: &mut ChaCha8Rng, level: CefrLevel, max: usize) -> Vec<String> {
    let mut ids: Vec<String> = store.taxonomy().at_level(level).map(|c| c.id.clone()).collect();
    ids.shuffle(rng);
    let k = rng.gen_range(1..=max.min(ids.len()));
    ids.truncate(k);
    ids
}

pub fn random_student(rng: &mut ChaCha8Rng, prefix: &str, i: usize) -> Student {
    const SURNAMES: [&str; 8] = ["Oe", "Rilke", "Sembène", "Goswami", "Garcia-Marquez", "Achebe", "Mann", "Lim"];
    const FIRST: [&str; 6] = ["Kenzaburo", "Rainer", "Ousmane", "Amar", "Gabriel", "Chinua"];
    Student::new(
        format!("{prefix}{i}"),
        *SURNAMES.choose(rng).unwrap(),
        *FIRST.choose(rng).unwrap(),
        format!("{prefix}{i}@school.example"),
    )
    .unwrap()
}

/// Builds a store with one course of up to `max_students` students,
/// `max_competencies` competencies and `max_assessments` assessments.
/// Timestamps are drawn from a narrow window so ties are common.
pub fn random_course(
    rng: &mut ChaCha8Rng,
    prefix: &str,
    level: CefrLevel,
    competency_ids: Option<Vec<String>>,
    max_students: usize,
    max_assessments: usize,
) -> RandomCourse {
    let clock = Arc::new(ManualClock::starting_at_millis(START_MS, 0));
    let mut store = taxonomy_store(clock.clone());
    let comps = competency_ids.unwrap_or_else(|| random_competencies(&store, rng, level, 40));
    let course_id = format!("{prefix}course");
    store
        .create_course(CourseDraft {
            id: Some(course_id.clone()),
            full_name: format!("{prefix} {level} gradebook"),
            short_name: format!("{prefix}-{level}"),
            level,
            competency_ids: Some(comps.clone()),
            ..Default::default()
        })
        .unwrap();
    let n_students = rng.gen_range(0..=max_students);
    let students: Vec<Student> = (0..n_students).map(|i| random_student(rng, prefix, i)).collect();
    for s in &students {
        store.add_student(s.clone()).unwrap();
        store.enroll(&course_id, &s.id).unwrap();
    }
    if !students.is_empty() {
        let n_assessments = rng.gen_range(0..=max_assessments);
        for _ in 0..n_assessments {
            let s = &students[rng.gen_range(0..students.len())];
            let c = &comps[rng.gen_range(0..comps.len())];
            clock.set(chrono::DateTime::from_timestamp_millis(START_MS + rng.gen_range(0..50)).unwrap());
            let feedback = rng.gen_bool(0.2).then(|| format!("note {}", rng.gen_range(0..100)));
            let assessor = ["rb", "tanaka", "smith"][rng.gen_range(0..3)];
            store
                .record_assessment(&s.id, c, score(rng.gen_range(1..=5)), feedback, assessor)
                .unwrap();
        }
    }
    RandomCourse {
        store,
        course_id,
        clock,
    }
}
