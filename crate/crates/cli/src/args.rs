use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "comptrack", version, about = "Track CEFR competencies from the command line")]
pub struct Cli {
    /// Local data directory (ignored when --server is given).
    #[arg(long, global = true, env = "COMPTRACK_DATA_DIR", default_value = "comptrack-data")]
    pub data_dir: PathBuf,
    /// Base URL of a comptrack server, e.g. http://localhost:8080.
    #[arg(long, global = true, env = "COMPTRACK_SERVER")]
    pub server: Option<String>,
    #[arg(long, global = true, env = "COMPTRACK_TOKEN", hide_env_values = true)]
    pub token: Option<String>,
    /// Placement table for `place` in local mode.
    #[arg(long, global = true, env = "COMPTRACK_PLACEMENT_TABLE")]
    pub placement_table: Option<PathBuf>,
    /// Print results as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Store and service status.
    Status,
    #[command(subcommand)]
    Outcomes(OutcomesCommand),
    /// List competencies.
    Competencies {
        #[arg(long)]
        level: Option<String>,
        #[arg(long)]
        kind: Option<String>,
    },
    #[command(subcommand)]
    Student(StudentCommand),
    #[command(subcommand)]
    Course(CourseCommand),
    Enroll {
        course: String,
        student: String,
    },
    Unenroll {
        course: String,
        student: String,
    },
    /// Change a course's full and/or short name.
    Rename {
        course: String,
        #[arg(long)]
        full_name: Option<String>,
        #[arg(long)]
        short_name: Option<String>,
    },
    /// Record an assessment and print the pair's new current rating.
    Grade {
        student: String,
        competency: String,
        #[arg(allow_negative_numbers = true)]
        score: i64,
        #[arg(long)]
        feedback: Option<String>,
        #[arg(long, env = "COMPTRACK_ASSESSOR", default_value = "cli")]
        assessor: String,
    },
    #[command(subcommand)]
    Report(ReportCommand),
    /// Who in a course has and has not studied a competency.
    Gaps {
        course: String,
        competency: String,
    },
    /// Whether a student has satisfied every competency of a level.
    Checklist {
        student: String,
        level: String,
        #[arg(long)]
        threshold: Option<i64>,
    },
    /// Map a placement test score to a level.
    Place {
        test: String,
        #[arg(allow_negative_numbers = true)]
        score: f64,
    },
    /// Write a course archive, or one student's dossier with --student.
    Export {
        course: String,
        #[arg(long)]
        student: Option<String>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Load an archive into a new course or an existing one.
    Import {
        file: PathBuf,
        /// new, new:<name>, merge:<course> or replace:<course>
        #[arg(long)]
        into: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum OutcomesCommand {
    /// Ingest an outcomes CSV (header: title,slug,kind,description).
    Import {
        /// CSV file; omit with --bundled.
        #[arg(required_unless_present = "bundled")]
        file: Option<PathBuf>,
        /// Use the CEFR taxonomy shipped with comptrack.
        #[arg(long, conflicts_with = "file")]
        bundled: bool,
        #[arg(long, default_value = "standard")]
        scope: String,
        #[arg(long)]
        course: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum StudentCommand {
    Add(StudentArgs),
    List,
}

#[derive(Debug, Args)]
pub struct StudentArgs {
    pub id: String,
    #[arg(long)]
    pub surname: String,
    #[arg(long)]
    pub first_name: String,
    #[arg(long)]
    pub email: String,
}

#[derive(Debug, Subcommand)]
pub enum CourseCommand {
    Create(CourseArgs),
    List,
}

#[derive(Debug, Args)]
pub struct CourseArgs {
    #[arg(long)]
    pub full_name: String,
    #[arg(long)]
    pub short_name: String,
    #[arg(long)]
    pub level: String,
    /// Defaults to the slugified short name.
    #[arg(long)]
    pub id: Option<String>,
    /// Only track competencies of this kind (grammar or function).
    #[arg(long)]
    pub kind: Option<String>,
    /// Explicit competency list; repeatable. Defaults to the whole level.
    #[arg(long = "competency")]
    pub competencies: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    Grader {
        course: String,
        /// table, csv, tsv or json
        #[arg(long, default_value = "table")]
        format: String,
    },
    User {
        course: String,
        student: String,
        #[arg(long, default_value = "table")]
        format: String,
    },
}
