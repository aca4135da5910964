use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supersurf")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn compute_reproduces_the_first_example() {
    let o = run(&["compute", &fixture("example1.surf"), "--backend", "symbolic"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("G11^2 = -1/2 f1(hbar)/f2(hbar) f'(t2) * 1/h(t1)"), "{out}");
    assert!(out.contains("G12^1 = 1/2 f'(t2)/f(t2)"), "{out}");
}

#[test]
fn flat_metric_has_vanishing_tensors() {
    let o = run(&["compute", &fixture("flat.surf")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("all components vanish").count(), 5);
}

#[test]
fn json_output_carries_schema_and_parities() {
    let o = run(&["compute", &fixture("example3.surf"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "supersurf-report/1");
    let parities: Vec<&str> = v["tables"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|t| t["components"].as_array().unwrap())
        .map(|c| c["parity"].as_str().unwrap())
        .collect();
    assert!(parities.contains(&"odd") && parities.contains(&"even"));
}

#[test]
fn exact_backend_uses_a_binding_set() {
    let a = stdout(&run(&["compute", &fixture("example2.surf"), "--backend", "exact"]));
    let b = stdout(&run(&["compute", &fixture("example2.surf"), "--backend", "exact", "--bindings", "2"]));
    assert!(a.contains("exact backend") && a != b);
    let o = run(&["compute", &fixture("example2.surf"), "--backend", "exact", "--bindings", "9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_reports_per_identity_verdicts() {
    let o = run(&["check", &fixture("example1.surf")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("10 pass, 0 fail, 0 not applicable"));

    let o = run(&["check", &fixture("example2.surf")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("torsion               not applicable"));

    let o = run(&["check", &fixture("example1.surf"), "--identities", "torsion,first_bianchi", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["identities"].as_array().unwrap().len(), 2);
    assert_eq!(v["identities"][0]["status"], "pass");
}

#[test]
fn random_metrics() {
    let o = run(&["check", "random", "--seed", "7", "--p", "1", "--order", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not invertible"));

    let o = run(&["check", "random", "--seed", "7", "--p", "1", "--order", "2", "--degree", "1", "--asymmetric"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let a = run(&["random", "--seed", "3", "--p", "2", "--degree", "1"]);
    let b = run(&["random", "--seed", "3", "--p", "2", "--degree", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let path = scratch("random.surf", &stdout(&a));
    let o = run(&["check", &path, "--order", "1", "--identities", "right_inverse,torsion,first_bianchi"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn example_diff_exits_zero_without_inconsistencies() {
    let o = run(&["example", "2", "--all"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("0 engine-inconsistent"));
    assert!(out.contains("G21^1 match"), "{out}");

    let o = run(&["example", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["inconsistent"], 0);
    assert!(run(&["example", "5"]).status.code() == Some(1));
}

#[test]
fn input_errors_exit_with_one() {
    let o = run(&["compute", "missing.surf"]);
    assert_eq!(o.status.code(), Some(1));

    let src = std::fs::read_to_string(fixture("example3.surf")).unwrap();
    let path = scratch("odd_eps.surf", &src.replace("eps = \"even\"", "eps = \"odd\""));
    let o = run(&["compute", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("parity error"), "{}", stderr(&o));

    let path = scratch("syntax.surf", "[surface]\neven = \"t1, t2\"\n[metric]\ng11 = \"1 +\"\n");
    assert_eq!(run(&["compute", &path]).status.code(), Some(1));

    let o = run(&["check", &fixture("flat.surf"), "--identities", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn singular_metric_exits_with_two() {
    let path = scratch(
        "singular.surf",
        "[surface]\neven = \"t1, t2\"\nodd = \"\"\norder = 2\ndegree = even\nbackend = exact\n\n[metric]\ng11 = \"1\"\ng12 = \"1\"\ng21 = \"1\"\ng22 = \"1\"\n",
    );
    let o = run(&["compute", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("singular metric"), "{}", stderr(&o));
}
