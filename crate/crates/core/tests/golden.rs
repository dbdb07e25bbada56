use std::path::{Path, PathBuf};
use std::process::Command;

use genlift::repl::run_script;

fn scripts_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/scripts")
}

fn golden(name: &str) -> (String, String) {
    let dir = scripts_dir();
    let script = std::fs::read_to_string(dir.join(format!("{name}.script"))).unwrap();
    let expected = std::fs::read_to_string(dir.join(format!("{name}.out"))).unwrap();
    (script, expected)
}

fn check(name: &str, should_fail: bool) {
    let (script, expected) = golden(name);
    let run = run_script(&script);
    assert_eq!(run.transcript, expected, "transcript of {name} drifted");
    assert_eq!(run.failed, should_fail);
}

#[test]
fn ipl_golden() {
    check("ipl", false);
}

#[test]
fn clerks_golden() {
    // Ends with an arity error on purpose.
    check("clerks", true);
}

#[test]
fn party_golden() {
    check("party", false);
}

#[test]
fn session_golden() {
    check("session", false);
}

#[test]
fn binary_matches_library_and_exit_status() {
    for (name, code) in [("ipl", 0), ("clerks", 1), ("party", 0), ("session", 0)] {
        let out = Command::new(env!("CARGO_BIN_EXE_genlift"))
            .arg("--script")
            .arg(scripts_dir().join(format!("{name}.script")))
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(code), "{name}");
        assert_eq!(
            String::from_utf8(out.stdout).unwrap(),
            golden(name).1,
            "{name}"
        );
    }
}

#[test]
fn unreadable_script_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_genlift"))
        .args(["--script", "/nonexistent/none.script"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn interactive_mode_reads_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_genlift"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let module =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/ipl.smod"))
            .unwrap();
    write!(
        child.stdin.take().unwrap(),
        "{module}\n(eval-gen f(X,X) .)\n(next .)\n"
    )
    .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "Module IPL loaded.\nResult: 2\nNo more solutions.\n"
    );
}
