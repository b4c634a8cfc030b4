use super::*;
use crate::Exec;

const BINDING9: &str = include_str!("../../../../scenarios/binding9.scenario");
const FOLD_CIRCLE: &str = include_str!("../../../../scenarios/fold_circle.scenario");
const BROKEN_G: &str = include_str!("../../../../scenarios/broken_g.scenario");
const OPEN_BOOK: &str = include_str!("../../../../scenarios/open_book.scenario");
const EXACT_BUNDLE: &str = include_str!("../../../../scenarios/exact_bundle.scenario");

fn run(text: &str) -> Outcome {
    Scenario::parse(text).unwrap().run(Exec::Parallel, 1e-9)
}

fn failures(o: &Outcome) -> Vec<String> {
    o.reports.iter().filter(|r| !r.passed).map(|r| format!("{}: {:?}", r.check, r.details)).collect()
}

#[test]
fn tokens_respect_quotes() {
    assert_eq!(tokens(r#"a body="x y" c"#), vec!["a", "body=x y", "c"]);
}

#[test]
fn continuation_lines_join() {
    let sc = Scenario::parse("[chart]\ncoords = x,y,z\n[forms]\neta = d[z]\n  + x d[y]  # tail\n").unwrap();
    assert_eq!(sc.form("eta").unwrap().to_string(), "x d[y] + d[z]");
}

#[test]
fn parse_errors_carry_lines() {
    let cases = [
        ("[chart]\ncoords = x,y\n[bogus]\n", 3),
        ("eta = d[x]\n", 1),
        ("[chart]\ncoords = x,y,z\n[forms]\neta = d[w]\n", 4),
        ("[chart]\ncoords = x,y,z\n[forms]\neta = d[z]\n[checks]\ncontact eta grid=q=0:1:2\n", 6),
        ("[profiles]\nf = f wobble=1\n", 2),
        ("[forms]\nb = @nope\n", 2),
    ];
    for (text, line) in cases {
        let e = Scenario::parse(text).unwrap_err();
        assert_eq!(e.line, line, "{text:?}: {e}");
    }
}

#[test]
fn evaluation_errors_fail_the_check() {
    let e = Scenario::parse("[chart]\ncoords = x,y,z\n[checks]\ncontact eta grid=x=0:1:2\n").unwrap_err();
    assert_eq!(e.line, 4);
    let o = run("[chart]\ncoords = x,y,z\n[forms]\nw = d[x]^d[y]\n[checks]\ncontact w grid=x=0:1:2\n");
    assert!(!o.passed);
    assert_eq!(o.reports[0].params["line"], 6);
    assert!(o.reports[0].details[0].contains("evaluation error"), "{:?}", o.reports[0].details);
}

#[test]
fn binding9_scenario() {
    let o = run(BINDING9);
    assert!(o.passed, "{:?}", failures(&o));
}

#[test]
fn fold_circle_scenario() {
    let o = run(FOLD_CIRCLE);
    assert!(o.passed, "{:?}", failures(&o));
}

#[test]
fn broken_g_fails() {
    let o = run(BROKEN_G);
    assert!(!o.passed);
    assert!(o.reports.iter().all(|r| !r.passed));
}

#[test]
fn open_book_scenario() {
    let o = run(OPEN_BOOK);
    assert!(o.passed, "{:?}", failures(&o));
}

#[test]
fn exact_bundle_scenario() {
    let o = run(EXACT_BUNDLE);
    assert!(o.passed, "{:?}", failures(&o));
}

#[test]
fn reports_are_deterministic() {
    let sc = Scenario::parse(FOLD_CIRCLE).unwrap();
    let a = sc.run(Exec::Parallel, 1e-9);
    let b = sc.run(Exec::Sequential, 1e-9);
    let strip = |o: &Outcome| {
        let mut v: serde_json::Value = serde_json::from_str(&o.to_json()).unwrap();
        for r in v["reports"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("elapsed_ms");
        }
        v
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(strip(&a)["version"], REPORT_VERSION);
}
