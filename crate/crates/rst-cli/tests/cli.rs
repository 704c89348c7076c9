use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rst::elaborator::elaborate_to_base;
use rst::model::{eval, eval_extended, Env, Universe};
use rst::syntax::{parse_formula, var, Signature};
use rst::Theory;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn rst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rst")).args(args).output().expect("run rst")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn entry(name: &str, file: &str) -> String {
    corpus().join(name).join(file).display().to_string()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("rst-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_accepts_a_corpus_proof() {
    let o = rst(&["check", &entry("comprehension_equivalence", "theory"), &entry("comprehension_equivalence", "proof")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("ok=true\nsteps=14\n"));
    assert!(out.contains("conclusion=iff ex x2 all x6 imp phi x6 x5 mem x6 x2"));
}

#[test]
fn check_reports_the_failing_step() {
    let o = rst(&["check", &entry("reject-capture", "theory"), &entry("reject-capture", "proof")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("ok=false"));
    assert!(out.contains("failed_step=2"));
}

#[test]
fn malformed_proof_is_an_input_error() {
    let p = scratch("bad-proof", "1. imp mem x1 ; taut\n");
    let o = rst(&["check", "rst", p.to_str().unwrap()]);
    std::fs::remove_file(&p).ok();
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("error="));
}

#[test]
fn unknown_theory_is_an_input_error() {
    let o = rst(&["check", "no-such-theory", &entry("pair_exists", "proof")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn expand_yields_a_checkable_primitive_script() {
    let o = rst(&["expand", &entry("quantifier_lifting", "theory"), &entry("quantifier_lifting", "proof")]);
    assert_eq!(o.status.code(), Some(0));
    let p = scratch("expanded", &stdout(&o));
    let c = rst(&["check", &entry("quantifier_lifting", "theory"), p.to_str().unwrap()]);
    std::fs::remove_file(&p).ok();
    assert_eq!(c.status.code(), Some(0));
    let out = stdout(&c);
    let get = |k: &str| out.lines().find_map(|l| l.strip_prefix(k)).unwrap().to_string();
    assert_eq!(get("steps="), get("primitive_steps="));
}

#[test]
fn rules_lists_every_derived_rule() {
    let out = stdout(&rst(&["rules"]));
    for r in ["prop", "replace", "deduction", "generalize", "comprehend", "stronger_exists"] {
        assert!(out.lines().any(|l| l.starts_with(&format!("rule={r} "))), "{r}");
    }
}

#[test]
fn elaborate_matches_golden_and_semantics() {
    let o = rst(&["elaborate", "rst-ext", "mem O x1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out, golden("elaborate_empty_member.txt"));

    let sig = Signature::rst_ext();
    let ext = parse_formula("mem O x1", &sig).unwrap();
    let base = parse_formula(out.trim().strip_prefix("base=").unwrap(), &sig).unwrap();
    assert!(base.is_base());
    assert_eq!(elaborate_to_base(&Theory::rst_ext(), &ext).unwrap(), base);
    let u = Universe::stage(3).unwrap();
    for a in u.individuals() {
        let env: Env = [(var(1), a.clone())].into_iter().collect();
        assert_eq!(eval_extended(&u, &ext, &env).unwrap().as_bool(), Some(eval(&u, &base, &env).unwrap()));
    }
}

#[test]
fn elaborate_rejects_unknown_symbols() {
    assert_eq!(rst(&["elaborate", "rst", "mem O x1"]).status.code(), Some(2));
}

#[test]
fn model_axiom_table_matches_golden() {
    let o = rst(&["model", "2", "--axioms"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("model_v2_axioms.txt"));
}

#[test]
fn model_axiom_table_in_v4() {
    let o = rst(&["model", "4", "--axioms"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("individuals=16"));
    assert_eq!(out.lines().filter(|l| l.contains("match=true")).count(), 6);
    assert!(out.contains("schema=A4 predicted=invalid observed=invalid"));
}

#[test]
fn model_formula_validity() {
    let inter = "imp ex x3 mem x3 x5 ex x4 all x7 iff mem x7 x4 all x6 imp mem x6 x5 mem x7 x6";
    let o = rst(&["model", "3", "--formula", inter]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("valid=true"));

    let o = rst(&["model", "3", "--formula", "ex x2 and mem x1 x2 mem x3 x2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample="));
}

#[test]
fn model_rejects_stages_above_the_cap() {
    let o = rst(&["model", "6", "--axioms"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hf_expressions() {
    let cases = [
        ("tc {{{}}}", "kind=set\nvalue={{} {{}}}\n"),
        ("card stage(4)", "kind=number\nvalue=16\n"),
        ("ordinals-in stage(4)", "kind=set\nvalue={{} {{}} {{} {{}}} {{} {{}} {{} {{}}}}}\n"),
        ("transitive? stage(3)", "kind=bool\nvalue=true\n"),
        ("sminus splus {{} {{{}}}}", "kind=set\nvalue={{} {{{}}}}\n"),
    ];
    for (expr, want) in cases {
        let o = rst(&["hf", expr]);
        assert_eq!(o.status.code(), Some(0), "{expr}");
        assert_eq!(stdout(&o), want, "{expr}");
    }
    assert_eq!(rst(&["hf", "pw stage(5)"]).status.code(), Some(1));
    assert_eq!(rst(&["hf", "pw {"]).status.code(), Some(2));
}

#[test]
fn corpus_filter_selects_one_entry() {
    let root = corpus();
    let o = rst(&["corpus", "pair_exists", "--root", root.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("entry=pair_exists result=pass"));
    assert!(out.ends_with("passed=1\ntotal=1\n"));
}

#[test]
fn corpus_filter_without_match_is_an_input_error() {
    let root = corpus();
    let o = rst(&["corpus", "no_such_entry", "--root", root.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corpus_audit_reports_no_violations() {
    let root = corpus();
    let o = rst(&["corpus", "singleton", "--audit", "--root", root.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("audit_violations=0"));
}

#[test]
fn output_is_byte_stable() {
    let root = corpus();
    let args = ["corpus", "--root", root.to_str().unwrap()];
    let a = rst(&args);
    let b = rst(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(rst(&["model", "3", "--axioms"]).stdout, rst(&["model", "3", "--axioms"]).stdout);
}
