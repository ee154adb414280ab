use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shortpa"))
}

fn fixture(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("shortpa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SAT: &str = "p cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n";
const UNSAT: &str = "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n";
const FOUR: &str = "p cnf 4 3\n1 -2 3 0\n-1 2 -4 0\n2 3 4 0\n";

#[test]
fn counts_and_decides_cnf() {
    let f = fixture("sat.cnf", SAT);
    let o = run(&["count", f.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "6");
    let u = fixture("unsat.cnf", UNSAT);
    let o = run(&["decide", u.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn verify_pipeline_passes_and_reports_counts() {
    let f = fixture("four.cnf", FOUR);
    let o = run(&["verify-pipeline", f.to_str().unwrap()]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.contains("sentence  ok    count 10"), "{out}");
    assert!(out.trim_end().ends_with("PASS"));

    let u = fixture("unsat2.cnf", UNSAT);
    let o = run(&["verify-pipeline", u.to_str().unwrap()]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(out.matches("count 0").count(), 3, "{out}");
    assert!(out.contains("value 0"));
}

#[test]
fn corrupted_encoding_fails_at_sentence() {
    let f = fixture("four2.cnf", FOUR);
    let o = run(&["verify-pipeline", f.to_str().unwrap(), "--corrupt-encoding"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(4), "{out}");
    let first_fail = out.lines().find(|l| l.contains("FAIL")).unwrap();
    assert!(first_fail.starts_with("sentence"), "{out}");
}

#[test]
fn oversized_stages_are_skipped_with_scale_exit() {
    let f = fixture("sat2.cnf", SAT);
    let o = run(&["verify-pipeline", f.to_str().unwrap(), "--stages", "sat,gip1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("gip1      skip"));
}

#[test]
fn reductions_have_the_expected_shape() {
    let f = fixture("sat3.cnf", SAT);
    let p = f.to_str().unwrap();
    let s = stdout(&run(&["reduce", p, "--target", "sentence"]));
    assert!(s.starts_with("SENTENCE\nE 1\nA 2\nE 2\nMATRIX\n"));
    assert_eq!(s.matches("(row").count(), 10);
    let g = stdout(&run(&["reduce", p, "--target", "gip1"]));
    assert!(g.starts_with("GIP 24 6\n"));
    let g2 = stdout(&run(&["reduce", p, "--target", "gip2"]));
    assert!(g2.starts_with("GIP ") && g2.lines().next().unwrap().ends_with(" 3"));
}

#[test]
fn reduce_is_byte_deterministic_and_reparses() {
    let f = fixture("sat4.cnf", SAT);
    let p = f.to_str().unwrap();
    for target in ["apcover", "sentence", "gip1", "gip2", "bilevel", "pareto"] {
        let a = run(&["reduce", p, "--target", target]);
        let b = run(&["reduce", p, "--target", target]);
        assert!(a.status.success(), "{target}");
        assert_eq!(a.stdout, b.stdout, "{target}");
    }
    let out = fixture("sat4.ap", "");
    let o = run(&["reduce", p, "--target", "apcover", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let o = run(&["decide", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&run(&["count", out.to_str().unwrap()])).trim(), "6");
}

#[test]
fn qbf_reduces_to_mapcover_with_same_truth() {
    // forall x1 exists x2: (x1 | x2) & (!x1 | !x2)
    let q = fixture("q.qdimacs", "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n");
    let truth = run(&["decide", q.to_str().unwrap()]);
    assert_eq!(truth.status.code(), Some(0));
    let m = fixture("q.map", "");
    let o = run(&["reduce", q.to_str().unwrap(), "--target", "mapcover", "-o", m.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(run(&["decide", m.to_str().unwrap()]).status.code(), Some(0));
    let s = stdout(&run(&["reduce", q.to_str().unwrap(), "--target", "sentence"]));
    assert_eq!(s.matches("(row").count(), 20);
}

#[test]
fn kpt_reports() {
    for (s, pts) in [(1, 2), (2, 3), (6, 7)] {
        let o = run(&["gen-kpt", "--s", &s.to_string()]);
        let out = stdout(&o);
        assert!(o.status.success());
        assert!(out.contains(&format!("# infeasible {pts}\n")), "{out}");
        assert!(out.contains("# strictly convex true"));
        assert!(out.contains("# midpoint free true"));
        if s == 6 {
            assert!(out.contains("# p 610 q 233"));
        }
    }
    assert_eq!(run(&["gen-kpt", "--s", "9"]).status.code(), Some(3));
}

#[test]
fn bilevel_and_pareto_generation() {
    let a = fixture("ref.ap", "J 1 5\nAP 2 1 3\n");
    let o = run(&["gen-bilevel", a.to_str().unwrap(), "--solve"]);
    assert!(stdout(&o).ends_with("# value 1\n"));
    let o = run(&["gen-pareto", a.to_str().unwrap(), "--solve"]);
    assert!(stdout(&o).ends_with("# min g -1 over 5 Pareto minima\n"));
    let b = fixture("ref.bilevel", "");
    run(&["gen-bilevel", a.to_str().unwrap(), "-o", b.to_str().unwrap()]);
    let o = run(&["decide", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("value 1\n"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let bad = fixture("bad.cnf", "p cnf 2 1\n1 x 0\n");
    let o = run(&["count", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn props_do_not_depend_on_jobs() {
    let a = run(&["props", "--cases", "6", "--seed", "3", "--jobs", "1"]);
    let b = run(&["props", "--cases", "6", "--seed", "3", "--jobs", "3"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn props_check_fixture_directory() {
    let dir = std::env::temp_dir().join(format!("shortpa-fixtures-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("ref.ap"), "J 1 5\nAP 2 1 3\n").unwrap();
    let o = bin()
        .args(["props", "--cases", "1"])
        .env("SHORTPA_FIXTURES", &dir)
        .output()
        .unwrap();
    assert!(stdout(&o).contains("fixtures     ok   1 cases"), "{}", stdout(&o));
}
