use std::io::Write;
use std::process::{Command, Output, Stdio};

fn afflang(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afflang")).args(args).output().unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_afflang"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn corpus(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn check_reports_contexts() {
    let o = afflang(&["check", &corpus("nat.afl")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "ok: {n : Nat, odd : bit, go : bit} -> {n : Nat, odd : bit, go : bit}\n");
}

#[test]
fn every_corpus_program_checks() {
    for entry in std::fs::read_dir(corpus("")).unwrap() {
        let path = entry.unwrap().path();
        let o = afflang(&["check", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), stderr(&o));
    }
}

#[test]
fn run_flip_loop() {
    let o = afflang(&["run", &corpus("flip_loop.afl"), "--fuel", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "b = ff\n");
}

#[test]
fn denote_agrees_with_run() {
    for name in ["nat.afl", "list_bit.afl", "pairs.afl", "trees.afl", "nested_mu.afl"] {
        let ran = afflang(&["run", &corpus(name)]);
        let denoted = afflang(&["denote", &corpus(name)]);
        let steps = afflang(&["denote", &corpus(name), "--fuel-model", "steps"]);
        assert_eq!(ran.status.code(), Some(0), "{name}");
        assert_eq!(stdout(&ran), stdout(&denoted), "{name}");
        assert_eq!(stdout(&ran), stdout(&steps), "{name}");
    }
}

#[test]
fn divergence_exits_two() {
    let o = afflang(&["run", &corpus("divergent.afl"), "--fuel", "50"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "OUT_OF_FUEL\n");
    let o = afflang(&["denote", &corpus("divergent.afl"), "--fuel", "50"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "BOTTOM\n");
}

#[test]
fn fuel_boundary_for_flip_loop() {
    // Two unfoldings: one that flips the guard, one that exits.
    let short = afflang(&["denote", &corpus("flip_loop.afl"), "--fuel", "1"]);
    assert_eq!(stdout(&short), "BOTTOM\n");
    let enough = afflang(&["denote", &corpus("flip_loop.afl"), "--fuel", "2"]);
    assert_eq!(stdout(&enough), "b = ff\n");
}

#[test]
fn trace_formats() {
    let text = afflang(&["trace", &corpus("flip_loop.afl")]);
    assert_eq!(text.status.code(), Some(0));
    let records = afflang(&["trace", &corpus("flip_loop.afl"), "--format", "records"]);
    let lines: Vec<&str> = std::str::from_utf8(&records.stdout).unwrap().lines().collect();
    assert!(lines.len() > 2);
    for (i, line) in lines.iter().enumerate() {
        assert!(line.starts_with(&format!("{{\"step\":{i},")), "{line}");
    }
    assert_eq!(stdout(&text).lines().count(), lines.len());
}

#[test]
fn verify_discardability() {
    let o = afflang(&["verify", "--suite", "discardability", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.starts_with("PASS discardability"), "{out}");
    assert!(out.ends_with("1/1 suites passed\n"), "{out}");
}

#[test]
fn verify_is_reproducible() {
    let args = ["verify", "--suite", "substitution", "--suite", "enumeration", "--seed", "3", "--format", "records"];
    let a = afflang(&args);
    let b = afflang(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn enumerate_values() {
    let o = afflang(&["enumerate", "bit", "--size-bound", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = afflang(&["enumerate", "Nat", "--size-bound", "7"]);
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = afflang(&["enumerate", "mu X. X * X"]);
    assert_eq!(stdout(&o), "");
}

#[test]
fn stdin_input() {
    let src = "input x : bit = tt;\ndiscard x;\nnew unit y";
    let o = with_stdin(&["run", "-"], src);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "y = *\n");
}

#[test]
fn type_errors_exit_one() {
    let o = with_stdin(&["check", "-"], "input x : bit;\nw = fold[mu X. I + X] x");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[type-mismatch]"), "{}", stderr(&o));
    let o = with_stdin(&["check", "-"], "discard z");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[unbound-variable]"), "{}", stderr(&o));
}

#[test]
fn syntax_errors_exit_sixty_five() {
    let o = with_stdin(&["check", "-"], "x = = y");
    assert_eq!(o.status.code(), Some(65));
    let o = with_stdin(&["run", "-"], "input x : bit;\ndiscard x");
    assert_eq!(o.status.code(), Some(65), "{}", stderr(&o));
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(afflang(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(afflang(&["verify", "--suite", "nonsense"]).status.code(), Some(64));
    assert_eq!(afflang(&["check", "/nonexistent/file.afl"]).status.code(), Some(66));
}
