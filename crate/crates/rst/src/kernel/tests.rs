use super::*;
use crate::model::{check_valid, Universe};
use crate::script::{parse_proof, parse_theory};
use crate::syntax::{parse_formula, var};

fn th(text: &str) -> Theory {
    parse_theory(text).unwrap()
}

fn f(t: &Theory, s: &str) -> Formula {
    parse_formula(s, &t.signature).unwrap()
}

fn run(t: &Theory, text: &str) -> Verdict {
    check_proof(&parse_proof(text, t).unwrap())
}

fn ok(t: &Theory, text: &str) {
    let v = run(t, text);
    assert!(v.ok, "{:?}", v.first_failure);
}

fn fails_at(t: &Theory, text: &str, step: usize) -> String {
    let v = run(t, text);
    let fl = v.first_failure.expect("failure");
    assert_eq!(fl.step, step, "{}", fl.reason);
    fl.reason
}

/// The expansion of a proof checks and ends in the same formula.
fn expands(t: &Theory, text: &str) -> Proof {
    let p = parse_proof(text, t).unwrap();
    let e = expand(&p).unwrap();
    assert!(e.is_primitive());
    assert_eq!(e.conclusion(), p.conclusion());
    let v = check_proof(&e);
    assert!(v.ok, "{:?}", v.first_failure);
    e
}

#[test]
fn logical_axioms() {
    let t = Theory::empty();
    ok(&t, "1. iff ex x1 mem x1 x2 not all x1 not mem x1 x2 ; ax-exdef");
    ok(&t, "1. imp all x1 mem x1 x2 mem x3 x2 ; ax-subst x1 x3");
    ok(&t, "1. imp all x1 mem x1 x2 mem x3 x2 ; ax-subst");
    ok(&t, "1. or not mem x1 x2 mem x1 x2 ; taut");
    ok(&t, "1. eq x4 x4 ; ax-eqrefl");
    ok(&t, "1. imp eq x1 x2 imp mem x1 x3 mem x2 x3 ; ax-eqcongr");
    ok(&t, "1. imp eq x1 x2 imp mem x1 x1 mem x1 x2 ; ax-eqcongr");
    ok(&t, "1. imp all x1 imp mem x2 x3 mem x1 x3 imp mem x2 x3 all x1 mem x1 x3 ; ax-qdist");
    fails_at(&t, "1. imp mem x1 x2 mem x2 x1 ; taut", 1);
    fails_at(&t, "1. imp eq x1 x2 imp mem x1 x1 mem x2 x2 ; ax-eqcongr", 1);
    fails_at(&t, "1. imp all x1 imp mem x1 x3 mem x1 x3 imp mem x1 x3 all x1 mem x1 x3 ; ax-qdist", 1);
    fails_at(&t, "1. imp all x1 ex x2 mem x1 x2 ex x2 mem x2 x2 ; ax-subst x1 x2", 1);
    fails_at(&t, "1. eq x1 x2 ; ax-eqrefl", 1);
    fails_at(&t, "1. iff ex x1 mem x1 x2 not all x2 not mem x1 x2 ; ax-exdef", 1);
}

#[test]
fn congruence_in_function_arguments() {
    let t = Theory::rst_ext();
    ok(&t, "1. imp eq x1 x2 imp mem pr(x1 x1) x3 mem pr(x1 x2) x3 ; ax-eqcongr");
    ok(&t, "1. imp eq x1 x2 imp sub x1 x3 sub x2 x3 ; ax-eqcongr");
    fails_at(&t, "1. imp eq x1 x2 imp mem pr(x1 x1) x3 mem pr(x2 x2) x3 ; ax-eqcongr", 1);
}

#[test]
fn rules() {
    let t = Theory::empty();
    ok(
        &t,
        "1. imp mem x1 x2 mem x1 x2 ; taut
         2. all x1 imp mem x1 x2 mem x1 x2 ; gen x1 1
         3. all x3 imp mem x3 x2 mem x3 x2 ; rename 2 x1 x3
         4. imp mem x5 x2 mem x5 x2 ; subst 1 x1 x5
         5. imp all x3 imp mem x3 x2 mem x3 x2 imp mem x2 x2 mem x2 x2 ; ax-subst
         6. imp mem x2 x2 mem x2 x2 ; mp 3 5",
    );
    fails_at(&t, "1. imp mem x1 x2 mem x1 x2 ; taut\n2. all x1 imp mem x1 x2 mem x1 x2 ; gen x1 2", 2);
    fails_at(&t, "1. mem x1 x2 ; mp 2 3", 1);
    fails_at(&t, "1. imp mem x1 x2 mem x1 x2 ; taut\n2. mem x1 x2 ; mp 1 1", 2);
    fails_at(&t, "1. all x1 eq x1 x2 ; rename 1 x1 x2", 1);
    // capture in substitution
    fails_at(&t, "1. eq x2 x2 ; ax-eqrefl\n2. all x1 eq x2 x2 ; gen x1 1\n3. all x1 eq x1 x1 ; subst 2 x2 x1", 3);
    fails_at(&t, "1. eq x1 x1 ; basis k", 1);
}

#[test]
fn swapped_steps_fail_at_forward_reference() {
    let t = Theory::empty();
    let good = "1. eq x1 x1 ; ax-eqrefl\n2. imp eq x1 x1 or eq x1 x1 mem x1 x1 ; taut\n3. or eq x1 x1 mem x1 x1 ; mp 1 2";
    ok(&t, good);
    let bad = "1. imp eq x1 x1 or eq x1 x1 mem x1 x1 ; taut\n2. eq x1 x1 ; ax-eqrefl\n3. or eq x1 x1 mem x1 x1 ; mp 3 1";
    assert!(fails_at(&t, bad, 3).contains("earlier"));
}

#[test]
fn schemas_are_strict() {
    let t = th("[extends]\nrst\n[signature]\nconst c\n");
    ok(&t, "1. imp all x3 iff mem x3 x1 mem x3 x2 eq x1 x2 ; schema A1");
    ok(&t, "1. imp all x3 iff mem x3 x1 mem x3 x2 eq x1 x2 ; schema");
    ok(&t, "1. ex x1 all x3 iff mem x3 x1 and mem x3 x2 not mem x3 x3 ; schema A2");
    // x occurs in the payload
    assert!(fails_at(&t, "1. ex x1 all x3 iff mem x3 x1 and mem x3 x2 mem x3 x2 ; schema A2", 1).contains("condition"));
    assert!(fails_at(&t, "1. ex x1 all x3 iff mem x3 x1 and mem x3 x2 mem x3 c ; schema A2", 1).contains("scratch"));
    fails_at(&t, "1. imp all x3 iff mem x3 x1 mem x3 x2 eq x2 x1 ; schema A1", 1);
    fails_at(&t, "1. ex x1 and mem x1 x1 mem x2 x1 ; schema A4", 1);
    let r = fails_at(&t, "1. ex x1 all x3 imp ex x2 and mem x2 x4 mem x3 x5 mem x3 x1 ; schema Repl", 1);
    assert!(r.contains("not active"));
}

#[test]
fn hypotheses_must_be_discharged() {
    let t = th("[extends]\nempty\n[signature]\nconst c\n[axioms]\nhyp h: mem c c\nk: eq c c\n");
    let r = fails_at(&t, "1. mem c c ; basis h", 1);
    assert!(r.contains("undischarged"));
    ok(&t, "1. eq c c ; basis k");
    ok(&t, "1. mem c c ; basis h\n2. imp mem c c mem c c ; deduction h 1");
    assert!(!check_proof(&Proof::new(t)).ok);
}

#[test]
fn deduction_identity_case() {
    let t = th("[extends]\nrst_ext\n[axioms]\nhyp h: mem O O\n");
    let p = parse_proof("1. mem O O ; basis h", &t).unwrap();
    let q = deduction_transform(&p, "h", 1).unwrap();
    assert_eq!(q.conclusion().unwrap(), &f(&t, "imp mem O O mem O O"));
    assert!(q.theory.axiom("h").is_none());
    assert!(check_proof(&q).ok);
}

#[test]
fn deduction_through_generalization_and_renaming() {
    let t = th("[extends]\nempty\n[signature]\nconst c\n[axioms]\nhyp h: all x1 mem x1 c\n");
    let text = "1. all x1 mem x1 c ; basis h
        2. imp all x1 mem x1 c mem x2 c ; ax-subst
        3. mem x2 c ; mp 1 2
        4. all x2 mem x2 c ; gen x2 3
        5. all x3 mem x3 c ; rename 4 x2 x3
        6. mem x4 c ; spec 5
        7. mem x5 c ; subst 6 x4 x5
        8. imp all x1 mem x1 c mem x5 c ; deduction h 7
        9. imp all x1 mem x1 c all x3 mem x3 c ; deduction h 5";
    ok(&t, text);
    let e = expands(&t, text);
    assert!(e.steps.iter().all(|s| s.just != Justification::Basis("h".into())));
}

#[test]
fn deduction_rejects_open_hypothesis() {
    let t = Theory::empty().extend_with_axiom("h", f(&Theory::empty(), "mem x1 x1")).unwrap();
    fails_at(&t, "1. mem x1 x1 ; basis h\n2. imp mem x1 x1 mem x1 x1 ; deduction h 1", 2);
}

#[test]
fn generalize_constants() {
    let t = th("[extends]\nrst\n[signature]\nconst c\n");
    let p = parse_proof("1. eq c c ; ax-eqrefl", &t).unwrap();
    let q = generalize_constant(&p, "c", var(1)).unwrap();
    assert_eq!(q.conclusion().unwrap(), &f(&t, "eq x1 x1"));
    assert!(check_proof(&q).ok);

    let text = "1. ex x1 all x3 iff mem x3 x1 and mem x3 x2 mem c x3 ; const_erw
        2. ex x1 all x3 iff mem x3 x1 and mem x3 x2 mem x5 x3 ; generalize c x5 1";
    ok(&t, text);
    expands(&t, text);

    let t2 = th("[extends]\nrst\n[signature]\nconst c\n[axioms]\nk: eq c c\n");
    let p = parse_proof("1. eq c c ; basis k", &t2).unwrap();
    assert!(generalize_constant(&p, "c", var(1)).unwrap_err().contains("basis"));
    // x1 is not fresh
    let p = parse_proof("1. imp mem x1 c mem x1 c ; taut", &t).unwrap();
    assert!(generalize_constant(&p, "c", var(1)).is_err());
    // only new constants
    let t3 = Theory::rst_ext();
    let p = parse_proof("1. eq O O ; ax-eqrefl", &t3).unwrap();
    assert!(generalize_constant(&p, "O", var(1)).is_err());
}

#[test]
fn equivalence_replacement() {
    let t = Theory::rst();
    let refl = parse_proof("1. iff mem x1 x2 mem x1 x2 ; taut", &t).unwrap();
    let ctx = f(&t, "all x3 and mem x1 x2 ex x1 mem x1 x3");
    let q = equivalence_replace(&refl, &ctx, &[0, 0]).unwrap();
    assert_eq!(q.conclusion().unwrap(), &Formula::iff(ctx.clone(), ctx.clone()));
    assert!(check_proof(&q).ok);
    assert!(equivalence_replace(&refl, &ctx, &[0, 1]).is_err());
    assert!(equivalence_replace(&refl, &ctx, &[3]).is_err());

    // the propositional step behind the empty-set argument
    let e = parse_proof("1. iff iff mem x2 x1 and mem x2 x3 not mem x2 x3 not mem x2 x1 ; taut", &t).unwrap();
    let ctx = f(&t, "ex x1 all x2 iff mem x2 x1 and mem x2 x3 not mem x2 x3");
    let q = equivalence_replace(&e, &ctx, &[0, 0]).unwrap();
    assert_eq!(q.conclusion().unwrap(), &f(&t, &format!("iff {ctx} ex x1 all x2 not mem x2 x1")));
    assert!(check_proof(&q).ok);
}

#[test]
fn equiv_and_replace_rules() {
    let t = th("[extends]\nrst\n[signature]\npred phi 1\n[axioms]\nk: all x1 and phi x1 phi x1\n");
    let text = "1. iff and phi x1 phi x1 phi x1 ; taut
        2. iff all x1 and phi x1 phi x1 all x1 phi x1 ; equiv 1
        3. all x1 and phi x1 phi x1 ; basis k
        4. all x1 phi x1 ; replace 1 3
        5. iff phi x1 and phi x1 phi x1 ; taut
        6. all x1 and phi x1 phi x1 ; replace 5 4
        7. iff or all x1 phi x1 all x1 phi x1 or all x1 and phi x1 phi x1 all x1 phi x1 ; equiv 1";
    ok(&t, text);
    expands(&t, text);
    fails_at(&t, "1. iff phi x1 phi x1 ; taut\n2. iff all x1 phi x1 all x2 phi x2 ; equiv 1", 2);
}

#[test]
fn alpha_rule() {
    let t = Theory::rst();
    let text = "1. iff all x1 ex x2 mem x1 x2 all x3 ex x1 mem x3 x1 ; alpha
        2. iff ex x1 and mem x1 x4 all x1 mem x1 x1 ex x5 and mem x5 x4 all x6 mem x6 x6 ; alpha";
    ok(&t, text);
    expands(&t, text);
    fails_at(&t, "1. iff all x1 mem x1 x2 all x2 mem x2 x2 ; alpha", 1);
    assert!(alpha_equivalent(&f(&t, "all x1 mem x1 x3"), &f(&t, "all x2 mem x2 x3")));
    assert!(!alpha_equivalent(&f(&t, "all x1 mem x1 x3"), &f(&t, "all x3 mem x3 x3")));
}

#[test]
fn quantifier_templates() {
    let t = th("[extends]\nempty\n[signature]\nconst c\npred a 1\npred b 1\n");
    let text = "1. imp all x1 imp a x1 b x1 imp all x1 a x1 all x1 b x1 ; all_imp
        2. imp all x1 imp a x1 b x1 imp ex x1 a x1 ex x1 b x1 ; all_imp_ex
        3. iff all x1 and a x1 b x1 and all x1 a x1 all x1 b x1 ; all_and
        4. imp a x2 ex x1 a x1 ; ex_intro
        5. imp a c ex x1 a x1 ; ex_intro c";
    ok(&t, text);
    expands(&t, text);

    let t = th("[extends]\nempty\n[signature]\npred a 1\npred b 1\n[axioms]\nk: all x1 imp a x1 b x2\nm: all x1 imp a x2 b x1\nn: ex x1 imp a x2 b x1\np: imp a x3 all x1 b x1\n");
    let text = "1. all x1 imp a x1 b x2 ; basis k
        2. imp ex x1 a x1 b x2 ; ex_elim 1
        3. all x1 imp a x2 b x1 ; basis m
        4. imp a x2 all x1 b x1 ; all_intro 3
        5. ex x1 imp a x2 b x1 ; basis n
        6. imp a x2 ex x1 b x1 ; ex_pull 5
        7. imp a x3 all x1 b x1 ; basis p
        8. imp a x3 b x4 ; inst 7
        9. all x1 imp a x2 b x1 ; basis m
        10. imp a x2 b x5 ; spec 9";
    ok(&t, text);
    expands(&t, text);
    fails_at(&t, "1. all x1 imp a x2 b x1 ; basis m\n2. imp ex x1 a x2 b x1 ; ex_elim 1", 2);
    fails_at(&t, "1. all x1 imp a x1 b x2 ; basis k\n2. imp a x1 all x1 b x2 ; all_intro 1", 2);
}

#[test]
fn monotonicity() {
    let t = th("[extends]\nempty\n[signature]\npred a 2\npred b 2\n[axioms]\nk: imp a x1 x2 b x1 x2\n");
    let p = parse_proof("1. imp a x1 x2 b x1 x2 ; basis k", &t).unwrap();
    for (mode, vars, goal) in [
        (MonotoneMode::All, &[var(2)][..], "imp all x2 a x1 x2 all x2 b x1 x2"),
        (MonotoneMode::Ex, &[var(2)][..], "imp ex x2 a x1 x2 ex x2 b x1 x2"),
        (MonotoneMode::ExAll, &[var(1), var(2)][..], "imp ex x1 all x2 a x1 x2 ex x1 all x2 b x1 x2"),
    ] {
        let q = quantifier_monotone(&p, mode, vars).unwrap();
        assert_eq!(q.conclusion().unwrap(), &f(&t, goal));
        assert!(check_proof(&q).ok);
    }
    assert!(quantifier_monotone(&p, MonotoneMode::ExAll, &[var(1), var(1)]).is_err());
    // ex_all agrees with all then ex
    let text = "1. imp a x1 x2 b x1 x2 ; basis k
        2. imp all x2 a x1 x2 all x2 b x1 x2 ; all_mono 1
        3. imp ex x1 all x2 a x1 x2 ex x1 all x2 b x1 x2 ; ex_mono 2
        4. imp ex x1 all x2 a x1 x2 ex x1 all x2 b x1 x2 ; ex_all_mono 1";
    ok(&t, text);
    // identical formulas
    let r = parse_proof("1. imp a x1 x2 a x1 x2 ; taut", &t).unwrap();
    let q = quantifier_monotone(&r, MonotoneMode::All, &[var(2)]).unwrap();
    assert_eq!(q.conclusion().unwrap(), &f(&t, "imp all x2 a x1 x2 all x2 a x1 x2"));
}

#[test]
fn subset_instances() {
    let t = Theory::rst();
    let direct = subset_instance(&t, &f(&t, "not mem x3 x3"), var(2), var(3), var(1)).unwrap();
    assert_eq!(direct.steps.len(), 1);
    assert!(matches!(direct.steps[0].just, Justification::Schema(Some(SchemaId::A2))));

    let p = subset_instance(&t, &f(&t, "mem x3 x2"), var(2), var(3), var(1)).unwrap();
    assert_eq!(p.conclusion().unwrap(), &f(&t, "ex x1 all x3 iff mem x3 x1 and mem x3 x2 mem x3 x2"));
    assert!(check_proof(&p).ok);

    let g = f(&t, "ex x1 and mem x1 x2 all x3 ex x1 mem x3 x1");
    let p = subset_instance(&t, &g, var(2), var(3), var(1)).unwrap();
    assert!(check_proof(&p).ok);

    assert!(subset_instance(&t, &f(&t, "mem x3 x1"), var(2), var(3), var(1)).is_err());
    assert!(subset_instance(&t, &f(&t, "mem x3 x2"), var(2), var(2), var(1)).is_err());

    // the asserted set exists in V4
    let u = Universe::stage(4).unwrap();
    let goal = direct.conclusion().unwrap();
    assert!(check_valid(&u, goal, 1 << 20).unwrap().is_valid());
}

#[test]
fn ext_and_stronger_exists() {
    let t = th("[extends]\nrst\n[signature]\npred a 1\npred b 1\n[axioms]\nk: ex x1 a x1\nm: all x1 imp a x1 b x1\n");
    let text = "1. iff all x3 iff mem x3 x1 mem x3 x2 eq x1 x2 ; ext_iff
        2. ex x1 a x1 ; basis k
        3. all x1 imp a x1 b x1 ; basis m
        4. ex x1 and a x1 b x1 ; stronger_exists 2 3";
    ok(&t, text);
    expands(&t, text);
}

#[test]
fn const_erw_rule() {
    let t = th("[extends]\nrst\n[signature]\nconst c\nconst d\n");
    let text = "1. ex x1 all x3 iff mem x3 x1 and mem x3 x2 and mem x3 c not mem d x3 ; const_erw";
    ok(&t, text);
    let e = expands(&t, text);
    assert_eq!(e.steps.len(), 3);
    fails_at(&t, "1. ex x1 all x3 iff mem x3 x1 and mem x3 x2 not mem x3 x3 ; const_erw", 1);
}

#[test]
fn derived_rule_errors() {
    let t = Theory::empty();
    assert!(fails_at(&t, "1. eq x1 x1 ; prop", 1).contains("tautology"));
    fails_at(&t, "1. eq x1 x1 ; ax-eqrefl\n2. all x1 eq x1 x1 ; ex_elim 1", 2);
    fails_at(&t, "1. eq x1 x1 ; ax-eqrefl\n2. eq x1 x1 ; spec 1 1", 2);
    fails_at(&t, "1. eq x1 x1 ; ax-eqrefl\n2. all x1 eq x1 x1 ; deduction 1", 2);
}

#[test]
fn deterministic() {
    let t = Theory::rst();
    let p = parse_proof("1. iff all x1 ex x2 mem x1 x2 all x3 ex x1 mem x3 x1 ; alpha\n2. eq x1 x2 ; mp 1 1", &t).unwrap();
    assert_eq!(check_proof(&p), check_proof(&p));
    assert_eq!(expand(&parse_proof("1. iff all x1 ex x2 mem x1 x2 all x3 ex x1 mem x3 x1 ; alpha", &t).unwrap()),
        expand(&parse_proof("1. iff all x1 ex x2 mem x1 x2 all x3 ex x1 mem x3 x1 ; alpha", &t).unwrap()));
}

#[test]
fn rule_table_is_complete() {
    for (name, _) in DERIVED_RULES {
        let t = Theory::empty();
        let r = derived::apply(&mut Trace::new(&t), name, &[], &[], &Formula::eq(var(1), var(1)));
        assert!(!r.is_err_and(|e| e.contains("unknown rule")), "{name}");
    }
}
