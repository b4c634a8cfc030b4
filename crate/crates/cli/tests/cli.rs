use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_contactcalc"));
    c.env_remove("CONTACTCALC_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim().to_string()
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

#[test]
fn single_operations() {
    let cases = [
        (vec!["d", "--chart", "x1,y1,z1", "--form", "d[z1]+x1 d[y1]"], "d[x1]^d[y1]"),
        (vec!["star", "--chart", "x,y,z", "--form", "d[x]"], "d[y]^d[z]"),
        (vec!["defect", "--chart", "x,y,z", "--form", "d[z]+x d[y]"], "1"),
        (vec!["wedge", "--chart", "x,y,z", "--form", "d[x]", "--form", "d[y]"], "d[x]^d[y]"),
        (vec!["wedge", "--chart", "x,y,z", "--forms", "d[y]; d[x]"], "-d[x]^d[y]"),
        (vec!["tau", "--chart", "x,y,z", "--form", "d[z]+x d[y]"], "d[x]^d[y] - x d[x]^d[z]"),
    ];
    for (args, want) in cases {
        let o = run(&args);
        assert!(o.status.success(), "{args:?}");
        assert_eq!(stdout(&o), want, "{args:?}");
    }
}

#[test]
fn printed_forms_reparse() {
    let chart = "t,x,y,z";
    for form in ["-exp(t) d[z] + x^2 d[y] - 3/2 y d[x]", "t x d[x]^d[y] + sin(z) d[t]^d[z]", "(x + y)^3 d[t]"] {
        for op in ["parse", "d", "star"] {
            let printed = stdout(&run(&[op, "--chart", chart, "--form", form]));
            let again = run(&["parse", "--chart", chart, "--form", &printed]);
            assert!(again.status.success(), "{op} {form}: {printed}");
            assert_eq!(stdout(&again), printed);
        }
    }
}

#[test]
fn json_output() {
    let o = run(&["parse", "--chart", "x,y,z", "--form", "x d[y]", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["degree"], 1);
    assert_eq!(v["terms"][0]["slots"][0], "y");
    let o = run(&["defect", "--chart", "x,y,z", "--form", "d[z]+x^3 d[y]", "--point", "x=0.5", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], 0.75);
}

#[test]
fn check_exit_codes() {
    let base = ["check", "--chart", "x,y,z", "--grid", "x=-1:1:5,y=-1:1:5"];
    let ok = run(&[&base[..], &["--form", "d[z] + x d[y]", "--point", "x=0.1"]].concat());
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&[&base[..], &["--form", "d[z] - x d[y]"]].concat());
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).starts_with("FAIL contact"));
    let conf = run(&[&base[..], &["--form", "d[z] + x^3 d[y]", "--mode", "confoliation"]].concat());
    assert_eq!(conf.status.code(), Some(0));
}

#[test]
fn tolerance_from_environment() {
    let args = ["check", "--chart", "x,y,z", "--grid", "x=0:1:3", "--form", "d[z] + x d[y]"];
    assert_eq!(run(&args).status.code(), Some(0));
    let o = bin().args(args).env("CONTACTCALC_TOL", "2").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn input_errors_exit_2() {
    for args in [
        vec!["d", "--chart", "x,y", "--form", "d["],
        vec!["d", "--chart", "x,x", "--form", "d[x]"],
        vec!["defect", "--chart", "x,y", "--form", "x d[y]"],
        vec!["check", "--chart", "x,y,z", "--form", "d[z]", "--grid", "w=0:1:2"],
        vec!["run", "/nonexistent.scenario"],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn scenario_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = bin().args(["run", scenario("binding9.scenario").to_str().unwrap(), "--out"]).arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["version"], 1);

    let o = run(&["run", scenario("broken_g.scenario").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reports"][0]["passed"], false);

    let o = run(&["run", scenario("fold_circle.scenario").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn scenario_parse_error_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scenario");
    std::fs::write(&path, "[chart]\ncoords = x,y,z\n[forms]\neta = d[q]\n").unwrap();
    let o = run(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn scenario_reports_are_reproducible() {
    let path = scenario("fold_circle.scenario");
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        for r in v["reports"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("elapsed_ms");
        }
        v.to_string()
    };
    let a = strip(run(&["run", path.to_str().unwrap()]));
    let b = strip(run(&["--sequential", "run", path.to_str().unwrap()]));
    assert_eq!(a, b);
}
