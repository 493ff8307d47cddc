use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use comptrack_service::{prepare, Config};
use tokio::runtime::Runtime;
use tokio::sync::oneshot;

const BIN: &str = env!("CARGO_BIN_EXE_comptrack");

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn finish(out: Output) -> Run {
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Runs the binary against a target: a data directory or a server URL.
#[derive(Clone)]
enum Target {
    Local(PathBuf),
    Remote { url: String, token: Option<String> },
}

impl Target {
    fn command(&self, cwd: &Path) -> Command {
        let mut c = Command::new(BIN);
        c.current_dir(cwd)
            .env_remove("COMPTRACK_SERVER")
            .env_remove("COMPTRACK_TOKEN")
            .env_remove("COMPTRACK_DATA_DIR")
            .env_remove("COMPTRACK_PLACEMENT_TABLE");
        match self {
            Target::Local(dir) => {
                c.env("COMPTRACK_DATA_DIR", dir)
                    .env("COMPTRACK_PLACEMENT_TABLE", placement_table());
            }
            Target::Remote { url, token } => {
                c.arg("--server").arg(url);
                if let Some(t) = token {
                    c.env("COMPTRACK_TOKEN", t);
                }
            }
        }
        c
    }

    fn run(&self, cwd: &Path, args: &[&str]) -> Run {
        finish(self.command(cwd).args(args).output().unwrap())
    }

    fn ok(&self, cwd: &Path, args: &[&str]) -> String {
        let r = self.run(cwd, args);
        assert_eq!(r.code, 0, "{args:?} failed: {}", r.stderr);
        r.stdout
    }
}

fn placement_table() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../config/placement.example.csv")
}

struct Server {
    url: String,
    rt: Runtime,
    stop: Option<oneshot::Sender<()>>,
    task: Option<tokio::task::JoinHandle<Result<(), comptrack_service::ServeError>>>,
}

impl Server {
    fn start(dir: &Path, token: Option<&str>) -> Server {
        let rt = Runtime::new().unwrap();
        let cfg = Config {
            data_dir: dir.to_path_buf(),
            bind: "127.0.0.1".parse().unwrap(),
            port: 0,
            placement_table: Some(placement_table()),
            checklist_threshold: 4,
            token: token.map(String::from),
        };
        let prepared = rt.block_on(prepare(&cfg)).unwrap();
        let url = format!("http://{}", prepared.local_addr().unwrap());
        let (tx, rx) = oneshot::channel::<()>();
        let task = rt.spawn(prepared.run(async {
            let _ = rx.await;
        }));
        Server {
            url,
            rt,
            stop: Some(tx),
            task: Some(task),
        }
    }

    fn stop(mut self) {
        self.shutdown();
    }

    fn shutdown(&mut self) {
        if let (Some(stop), Some(task)) = (self.stop.take(), self.task.take()) {
            let _ = stop.send(());
            self.rt.block_on(task).unwrap().unwrap();
        }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        self.shutdown();
    }
}

/// The B1 class through the CLI: taxonomy, one course, three students, a
/// few grades.
fn seed(t: &Target, cwd: &Path) {
    t.ok(cwd, &["outcomes", "import", "--bundled"]);
    t.ok(
        cwd,
        &[
            "course", "create", "--id", "b1", "--full-name", "CEFR B1 Grammar Competencies", "--short-name",
            "CEFR B1 Comp", "--level", "B1", "--kind", "grammar",
        ],
    );
    for (id, surname, first, email) in [
        ("gm", "Garcia-Marquez", "Gabriel", "g@b.com"),
        ("ag", "Goswami", "Amar", "f@b.com"),
        ("os", "Sembène", "Ousmane", "c@b.com"),
    ] {
        t.ok(
            cwd,
            &["student", "add", id, "--surname", surname, "--first-name", first, "--email", email],
        );
        t.ok(cwd, &["enroll", "b1", id]);
    }
    t.ok(cwd, &["grade", "gm", "b1-should-have-might-have-etc", "4"]);
    t.ok(cwd, &["grade", "os", "b1-should-have-might-have-etc", "1", "--feedback", "revise, then retry"]);
}

fn workflow(t: &Target) {
    let cwd = tempfile::tempdir().unwrap();
    let cwd = cwd.path();
    seed(t, cwd);

    assert_eq!(t.ok(cwd, &["grade", "gm", "b1-modals-past", "3"]), "3\n");
    assert_eq!(t.ok(cwd, &["grade", "gm", "b1-modals-past", "5"]), "5\n");

    let r = t.run(cwd, &["grade", "gm", "b1-modals-past", "9"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("score.out_of_range"), "{}", r.stderr);
    let r = t.run(cwd, &["grade", "gm", "b1-modals-past", "-1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("score.out_of_range"), "{}", r.stderr);

    let r = t.run(cwd, &["grade", "gm"]);
    assert_eq!(r.code, 2);
    let r = t.run(cwd, &["frobnicate"]);
    assert_eq!(r.code, 2);

    let r = t.run(cwd, &["report", "grader", "nope"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("course.unknown"), "{}", r.stderr);

    let table = t.ok(cwd, &["report", "grader", "b1"]);
    let goswami = table.lines().find(|l| l.starts_with("Goswami")).unwrap();
    assert!(goswami.split_whitespace().skip(3).all(|c| c == "-"), "{goswami}");
    assert!(table.lines().last().unwrap().starts_with("Overall average"));

    let csv = t.ok(cwd, &["report", "grader", "b1", "--format", "csv"]);
    assert!(csv.starts_with("Surname,First name,Email address,\"B1 Should have, might have/etc.\","));
    let tsv = t.ok(cwd, &["report", "grader", "b1", "--format", "tsv"]);
    assert_eq!(tsv.lines().count(), csv.lines().count());
    let r = t.run(cwd, &["report", "grader", "b1", "--format", "xlsx"]);
    assert!(r.stderr.starts_with("report.unsupported_format"));

    let user = t.ok(cwd, &["report", "user", "b1", "os"]);
    assert!(user.contains("revise, then retry"));

    let gaps = t.ok(cwd, &["gaps", "b1", "b1-should-have-might-have-etc"]);
    assert!(gaps.contains("studied (2): gm 4, os 1"), "{gaps}");
    assert!(gaps.contains("not studied (1): ag"), "{gaps}");

    let list = t.ok(cwd, &["checklist", "gm", "b1"]);
    assert!(list.starts_with("gm B1: "), "{list}");
    let r = t.run(cwd, &["checklist", "gm", "Z3"]);
    assert!(r.stderr.starts_with("level.unknown"));

    assert_eq!(t.ok(cwd, &["place", "entry-test", "45"]), "B1\n");
    let r = t.run(cwd, &["place", "exit-test", "45"]);
    assert!(r.stderr.starts_with("placement.unknown_test"), "{}", r.stderr);

    // export one student and merge into a second B1 course
    t.ok(
        cwd,
        &["course", "create", "--id", "b1-other", "--full-name", "B1 evening", "--short-name", "B1 eve", "--level", "B1"],
    );
    let wrote = t.ok(cwd, &["export", "b1", "--student", "gm", "-o", "gm.ctar"]);
    assert_eq!(wrote, "wrote gm.ctar\n");
    let summary = t.ok(cwd, &["import", "gm.ctar", "--into", "merge:b1-other"]);
    assert_eq!(
        summary,
        "b1-other: 0 students added, 0 assessments added, 3 skipped, 0 competencies added\n"
    );
    let roster = t.ok(cwd, &["--json", "course", "list"]);
    let courses: serde_json::Value = serde_json::from_str(&roster).unwrap();
    let other = courses.as_array().unwrap().iter().find(|c| c["id"] == "b1-other").unwrap();
    assert_eq!(other["roster"], serde_json::json!(["gm"]));

    let copy = t.ok(cwd, &["import", "gm.ctar", "--into", "new"]);
    assert!(copy.starts_with("b1-copy-1:") || copy.starts_with("cefr-b1-comp-copy-1:"), "{copy}");
    let r = t.run(cwd, &["import", "gm.ctar", "--into", "sideways"]);
    assert!(r.stderr.starts_with("request.invalid"));

    t.ok(cwd, &["rename", "b1", "--short-name", "B1 writers"]);
    t.ok(cwd, &["unenroll", "b1", "ag"]);
    let table = t.ok(cwd, &["report", "grader", "b1"]);
    assert!(!table.contains("Goswami"));
    let status = t.ok(cwd, &["status"]);
    assert!(status.starts_with("ok: 229 competencies, 3 students, 3 courses"), "{status}");
}

#[test]
fn local_workflow() {
    let data = tempfile::tempdir().unwrap();
    workflow(&Target::Local(data.path().to_path_buf()));

    let cwd = tempfile::tempdir().unwrap();
    let mut c = Target::Local(data.path().to_path_buf()).command(cwd.path());
    let r = finish(c.env_remove("COMPTRACK_PLACEMENT_TABLE").args(["place", "entry-test", "1"]).output().unwrap());
    assert!(r.stderr.starts_with("placement.not_configured"), "{}", r.stderr);
}

#[test]
fn remote_workflow() {
    let data = tempfile::tempdir().unwrap();
    let server = Server::start(data.path(), None);
    workflow(&Target::Remote {
        url: server.url.clone(),
        token: None,
    });
}

#[test]
fn csv_matches_the_service_endpoint_and_local_mode() {
    let data = tempfile::tempdir().unwrap();
    let server = Server::start(data.path(), Some("t0ken"));
    let remote = Target::Remote {
        url: server.url.clone(),
        token: Some("t0ken".into()),
    };
    let cwd = tempfile::tempdir().unwrap();
    seed(&remote, cwd.path());

    let via_cli = remote.ok(cwd.path(), &["report", "grader", "b1", "--format", "csv"]);
    let via_http = reqwest::blocking::Client::new()
        .get(format!("{}/api/v1/courses/b1/grader-report?format=csv", server.url))
        .bearer_auth("t0ken")
        .send()
        .unwrap()
        .text()
        .unwrap();
    assert_eq!(via_cli, via_http);

    // reads in local mode work beside a running server; writes are refused
    let local = Target::Local(data.path().to_path_buf());
    assert_eq!(local.ok(cwd.path(), &["report", "grader", "b1", "--format", "csv"]), via_http);
    let r = local.run(cwd.path(), &["grade", "gm", "b1-modals-past", "5"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("store.locked"), "{}", r.stderr);

    let anonymous = Target::Remote {
        url: server.url.clone(),
        token: None,
    };
    let r = anonymous.run(cwd.path(), &["course", "list"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("auth.unauthorized"), "{}", r.stderr);

    server.stop();
    // after shutdown the directory is free again
    assert_eq!(local.ok(cwd.path(), &["grade", "gm", "b1-modals-past", "5"]), "5\n");
}

#[test]
fn unreachable_server_is_a_transport_error() {
    let cwd = tempfile::tempdir().unwrap();
    let t = Target::Remote {
        url: "http://127.0.0.1:9".into(),
        token: None,
    };
    let r = t.run(cwd.path(), &["status"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("transport.error"), "{}", r.stderr);
}

#[test]
fn corrupt_store_is_refused() {
    let data = tempfile::tempdir().unwrap();
    let t = Target::Local(data.path().to_path_buf());
    let cwd = tempfile::tempdir().unwrap();
    t.ok(cwd.path(), &["outcomes", "import", "--bundled"]);
    let path = data.path().join("store.json");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    let r = t.run(cwd.path(), &["status"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("store.corrupt"), "{}", r.stderr);
}
