use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_obstructa"))
}

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn spec(name: &str) -> String {
    specs().join(format!("{}.json", name.to_lowercase())).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).stdin(Stdio::null()).output().unwrap()
}

fn run_with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8(b.to_vec()).unwrap()
}

#[test]
fn shipped_specs_match_the_built_examples() {
    for name in ["E-zero", "E-free", "E1", "E2", "E3", "E4"] {
        let out = run(&["example", name]);
        assert!(out.status.success());
        assert_eq!(text(&out.stdout), std::fs::read_to_string(spec(name)).unwrap(), "{}", name);
    }
}

#[test]
fn example_pipes_into_hochschild() {
    let json = run(&["example", "E2"]).stdout;
    let out = run_with_stdin(&["hochschild", "--emax", "3", "--lmax", "4", "--format", "records"], &json);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let body = text(&out.stdout);
    assert!(body.starts_with("# obstructa hochschild\tspec=E2\tlmax=4 emax=3 "), "{}", body);
    assert!(body.lines().any(|l| l.starts_with("homology\t")));
}

#[test]
fn records_are_byte_identical_across_runs() {
    for args in [
        vec!["cyclic", "--lmax", "3", "--emax", "2"],
        vec!["vanish", "--lmax", "3", "--emax", "4"],
        vec!["pages", "--lmax", "2", "--emax", "3"],
        vec!["dual-ce", "--lmax", "2", "--emax", "2"],
    ] {
        let s = spec("E2");
        let mut full = args.clone();
        full.extend(["--spec", s.as_str(), "--format", "records"]);
        let a = run(&full);
        let b = run(&full);
        assert!(a.status.success(), "{:?}: {}", args, text(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{:?}", args);
    }
}

#[test]
fn empty_result_is_header_only() {
    let out = run(&["bar", "--spec", &spec("E1"), "--degrees", "100..101", "--format", "records"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), "# obstructa bar\tspec=E1\tlmax=3 emax=3 slope=1 halo=1 degrees=100..101\n");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bar", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["bar", "--spec", "/nonexistent/spec.json"]).status.code(), Some(2));
    assert_eq!(run(&["bar", "--spec", &spec("E1"), "--emax", "one"]).status.code(), Some(2));
    assert_eq!(run(&["bar"]).status.code(), Some(2));
    assert_eq!(run(&["example", "E9"]).status.code(), Some(2));
    let malformed = run_with_stdin(&["bar", "--spec", "-"], b"{\"name\": 3}");
    assert_eq!(malformed.status.code(), Some(2));
    assert!(text(&malformed.stderr).contains("line 1, column"));
    let capped = bin().args(["bar", "--spec", &spec("E1")]).env("OBSTRUCTA_CAP", "10").stdin(Stdio::null()).output().unwrap();
    assert_eq!(capped.status.code(), Some(3));
    assert_eq!(run(&["bar", "--spec", &spec("E1"), "--lmax", "2"]).status.code(), Some(0));
}

#[test]
fn vanish_without_certificate_exits_one() {
    let out = run(&["vanish", "--spec", &spec("E3")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains("no certificate: all primary obstructions exact"));
    let ok = run(&["vanish", "--spec", &spec("E2"), "--emax", "4"]);
    assert_eq!(ok.status.code(), Some(0), "{}", text(&ok.stdout));
    assert!(text(&ok.stdout).contains("certificate from y"));
}

#[test]
fn gamma_reports_cycle_and_certificate() {
    let out = run(&["gamma", "--spec", &spec("E2"), "--emax", "5", "--lmax", "1", "--format", "records"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let body = text(&out.stdout);
    assert!(body.contains("d̂(γ) = 0 within window"));
    assert!(body.lines().any(|l| l.starts_with("certificate\t") && l.contains("leading=(1)1")));
}

#[test]
fn deformed_spec_chains_into_validate() {
    let path = std::env::temp_dir().join(format!("obstructa-deformed-{}.json", std::process::id()));
    let p = path.display().to_string();
    let out = run(&["deform", "--spec", &spec("E3"), "--out", &p]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let check = run(&["validate", "--spec", &p, "--format", "records"]);
    assert_eq!(check.status.code(), Some(0), "{}", text(&check.stdout));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn validate_reports_violations() {
    let bad = std::fs::read_to_string(spec("E1")).unwrap().replace("\"degree\": 2", "\"degree\": 3");
    let out = run_with_stdin(&["validate", "--format", "records"], bad.as_bytes());
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).lines().any(|l| l.starts_with("violation\t") && l.contains("degree")));
}
