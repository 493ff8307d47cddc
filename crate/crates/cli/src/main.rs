//! `comptrack`: every tracking workflow from a shell, against a local data
//! directory or a running server (`--server`).
//!
//! Exit status is 0 on success, 1 for domain errors (the stable error code is
//! printed on stderr) and 2 for usage errors.

mod args;
mod backend;
mod error;
mod render;

use std::io::{Read, Write};
use std::process::ExitCode;

use clap::Parser;
use comptrack_core::portability::BUNDLED_OUTCOMES_CSV;
use comptrack_core::reporting::Tabular;
use comptrack_core::{
    export_report, parse_level, CompetencyKind, CourseDraft, ImportDestination, ImportScope, ReportFormat,
    Score, Student,
};
use serde::Serialize;

use args::{Cli, Command, CourseCommand, OutcomesCommand, ReportCommand, StudentCommand};
use backend::{Backend, Local, Remote};
use error::{CliError, Result};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {e}", e.code());
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let backend: Box<dyn Backend> = match &cli.server {
        Some(url) => Box::new(Remote::new(url, cli.token.clone())?),
        None => Box::new(Local::new(&cli.data_dir, cli.placement_table.clone())),
    };
    let out = Output { json: cli.json };
    execute(cli.command, backend.as_ref(), &out)
}

struct Output {
    json: bool,
}

impl Output {
    /// JSON when requested, the text rendering otherwise.
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce(&T) -> String) -> Result<()> {
        let s = if self.json {
            serde_json::to_string_pretty(value).map_err(|e| CliError::Transport(e.to_string()))? + "\n"
        } else {
            text(value)
        };
        write_stdout(s.as_bytes())
    }
}

fn write_stdout(bytes: &[u8]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)?;
    out.flush()?;
    Ok(())
}

fn lines<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().map(|l| l + "\n").collect()
}

fn report<T: Tabular + Serialize>(report: &T, format: &str, out: &Output) -> Result<()> {
    match format {
        "table" if !out.json => write_stdout(render::table(report).as_bytes()),
        "table" | "json" => out.emit(report, |_| String::new()),
        other => {
            let format: ReportFormat = other.parse()?;
            write_stdout(&export_report(report, format)?)
        }
    }
}

fn execute(command: Command, b: &dyn Backend, out: &Output) -> Result<()> {
    match command {
        Command::Status => out.emit(&b.status()?, |s| {
            format!(
                "{}: {} competencies, {} students, {} courses, {} assessments\n",
                s.status, s.competencies, s.students, s.courses, s.assessments
            )
        }),
        Command::Outcomes(OutcomesCommand::Import {
            file,
            bundled,
            scope,
            course,
        }) => {
            let scope = match (scope.as_str(), course) {
                ("standard", None) => ImportScope::Standard,
                ("custom", Some(c)) => ImportScope::Custom(c),
                ("custom", None) => {
                    return Err(comptrack_core::Error::Invalid("--scope custom needs --course".into()).into())
                }
                ("standard", Some(_)) => {
                    return Err(comptrack_core::Error::Invalid("--course needs --scope custom".into()).into())
                }
                (other, _) => return Err(comptrack_core::Error::Invalid(format!("unknown scope {other:?}")).into()),
            };
            let csv = match file {
                _ if bundled => BUNDLED_OUTCOMES_CSV.as_bytes().to_vec(),
                Some(p) if p.as_os_str() == "-" => {
                    let mut buf = Vec::new();
                    std::io::stdin().read_to_end(&mut buf)?;
                    buf
                }
                Some(p) => std::fs::read(p)?,
                None => unreachable!("clap requires a file unless --bundled"),
            };
            let added = b.import_outcomes(csv, scope)?;
            out.emit(&added, |a| format!("imported {} new competencies\n", a.len()))
        }
        Command::Competencies { level, kind } => {
            let level = level.as_deref().map(parse_level).transpose()?;
            let kind = kind.as_deref().map(str::parse::<CompetencyKind>).transpose()?;
            out.emit(&b.competencies(level, kind)?, |list| {
                lines(list.iter().map(|c| format!("{}\t{}\t{}\t{}", c.id, c.level, c.kind, c.title)))
            })
        }
        Command::Student(StudentCommand::Add(a)) => {
            let student = Student {
                id: a.id,
                surname: a.surname,
                first_name: a.first_name,
                email: a.email,
            };
            out.emit(&b.add_student(student)?, |s| format!("added {} ({})\n", s.id, s.full_name()))
        }
        Command::Student(StudentCommand::List) => out.emit(&b.students()?, |list| {
            lines(list.iter().map(|s| format!("{}\t{}\t{}\t{}", s.id, s.surname, s.first_name, s.email)))
        }),
        Command::Course(CourseCommand::Create(a)) => {
            let draft = CourseDraft {
                id: a.id,
                full_name: a.full_name,
                short_name: a.short_name,
                level: parse_level(&a.level)?,
                competency_ids: (!a.competencies.is_empty()).then_some(a.competencies),
                kind: a.kind.as_deref().map(str::parse).transpose()?,
            };
            out.emit(&b.create_course(draft)?, |c| {
                format!(
                    "created {} \"{}\" ({}, {} competencies)\n",
                    c.id,
                    c.full_name,
                    c.level,
                    c.competency_ids.len()
                )
            })
        }
        Command::Course(CourseCommand::List) => out.emit(&b.courses()?, |list| {
            lines(list.iter().map(|c| {
                format!("{}\t{}\t{}\t{}\t{} students", c.id, c.level, c.short_name, c.full_name, c.roster.len())
            }))
        }),
        Command::Enroll { course, student } => out.emit(&b.enroll(&course, &student)?, |c| {
            format!("{student} enrolled in {} ({} students)\n", c.id, c.roster.len())
        }),
        Command::Unenroll { course, student } => out.emit(&b.unenroll(&course, &student)?, |c| {
            format!("{student} removed from {} ({} students)\n", c.id, c.roster.len())
        }),
        Command::Rename {
            course,
            full_name,
            short_name,
        } => out.emit(&b.rename(&course, full_name, short_name)?, |c| {
            format!("{}: \"{}\" / \"{}\"\n", c.id, c.full_name, c.short_name)
        }),
        Command::Grade {
            student,
            competency,
            score,
            feedback,
            assessor,
        } => {
            let graded = b.grade(&student, &competency, score, feedback, &assessor)?;
            out.emit(&graded, |g| format!("{}\n", g.current_rating))
        }
        Command::Report(ReportCommand::Grader { course, format }) => report(&b.grader_report(&course)?, &format, out),
        Command::Report(ReportCommand::User {
            course,
            student,
            format,
        }) => report(&b.user_report(&course, &student)?, &format, out),
        Command::Gaps { course, competency } => out.emit(&b.gaps(&course, &competency)?, |g| {
            let studied: Vec<String> = g.studied.iter().map(|e| format!("{} {}", e.student_id, e.score)).collect();
            format!(
                "{}\nstudied ({}): {}\nnot studied ({}): {}\ninclude in curriculum: {}\n",
                g.title,
                g.studied.len(),
                studied.join(", "),
                g.unstudied.len(),
                g.unstudied.join(", "),
                if g.include_in_curriculum { "yes" } else { "no" }
            )
        }),
        Command::Checklist {
            student,
            level,
            threshold,
        } => {
            let level = parse_level(&level)?;
            let threshold = threshold.map(Score::new).transpose()?;
            out.emit(&b.checklist(&student, level, threshold)?, |c| {
                let mut s = if c.complete {
                    format!("{} {}: complete\n", c.student_id, c.level)
                } else {
                    format!(
                        "{} {}: {} below {}\n",
                        c.student_id,
                        c.level,
                        c.missing.len(),
                        c.threshold
                    )
                };
                for m in &c.missing {
                    s.push_str(&format!("  {}\t{}\n", m.rating, m.title));
                }
                s
            })
        }
        Command::Place { test, score } => {
            let level = b.place(&test, score)?;
            out.emit(&level, |l| format!("{l}\n"))
        }
        Command::Export {
            course,
            student,
            output,
        } => {
            let (name, bytes) = b.export(&course, student.as_deref())?;
            let path = output.unwrap_or_else(|| name.into());
            std::fs::write(&path, bytes)?;
            let path = path.display().to_string();
            out.emit(&path, |p| format!("wrote {p}\n"))
        }
        Command::Import { file, into } => {
            let dest: ImportDestination = into.parse()?;
            let bytes = std::fs::read(file)?;
            out.emit(&b.import(bytes, &dest)?, |o| {
                let s = &o.summary;
                format!(
                    "{}: {} students added, {} assessments added, {} skipped, {} competencies added\n",
                    o.course_id, s.students_added, s.assessments_added, s.assessments_skipped, s.competencies_added
                )
            })
        }
    }
}
