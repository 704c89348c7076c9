mod common;

use proptest::prelude::*;
use rst::kernel::taut::is_tautology;
use rst::kernel::{check_proof, equivalence_replace, expand, Justification, Proof, Step};
use rst::model::{check_valid, Universe};
use rst::syntax::{rename_bound, var, Formula};
use rst::Theory;

use common::base_formula;

fn positions(f: &Formula) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for (k, c) in f.children().into_iter().enumerate() {
        for mut p in positions(c) {
            p.insert(0, k);
            out.push(p);
        }
    }
    out
}

fn derived(rule: &str, premises: Vec<usize>) -> Justification {
    Justification::Derived { rule: rule.into(), args: vec![], premises }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Truth-table tautologies are valid in V2.
    #[test]
    fn tautologies_are_valid(f in base_formula(3, 4), g in base_formula(3, 3)) {
        let u = Universe::stage(2).unwrap();
        for h in [f.clone(), Formula::imp(Formula::and(f.clone(), g.clone()), f.clone()), Formula::or(g.clone(), Formula::not(g.clone()))] {
            if is_tautology(&h).unwrap() {
                prop_assert!(check_valid(&u, &h, 1 << 16).unwrap().is_valid(), "{}", h);
            }
        }
    }

    /// Renaming a binder yields an alpha step whose expansion checks.
    #[test]
    fn alpha_steps_check(f in base_formula(4, 4), old in 1u32..=4, fresh in 5u32..=7) {
        let g = rename_bound(&f, var(old), var(fresh)).unwrap();
        let mut p = Proof::new(Theory::empty());
        p.steps.push(Step::new(Formula::iff(f.clone(), g.clone()), derived("alpha", vec![])));
        let v = check_proof(&p);
        prop_assert!(v.ok, "{:?}", v.first_failure);
        let e = expand(&p).unwrap();
        prop_assert!(e.is_primitive() && check_proof(&e).ok);
    }

    /// Replacing any subformula F by `not not F` is a provable equivalence.
    #[test]
    fn equivalence_replace_anywhere(ctx in base_formula(4, 4), pick in any::<prop::sample::Index>()) {
        let ps = positions(&ctx);
        let pos = pick.get(&ps).clone();
        let sub = ctx.subformula_at(&pos).unwrap().clone();
        let nn = Formula::not(Formula::not(sub.clone()));
        let mut p = Proof::new(Theory::empty());
        p.steps.push(Step::new(Formula::iff(sub, nn.clone()), Justification::Taut));
        let q = equivalence_replace(&p, &ctx, &pos).unwrap();
        let want = Formula::iff(ctx.clone(), ctx.replace_at(&pos, nn).unwrap());
        prop_assert_eq!(q.conclusion().unwrap(), &want);
        let v = check_proof(&q);
        prop_assert!(v.ok, "{:?}", v.first_failure);
    }

    /// Checking is deterministic.
    #[test]
    fn checking_is_deterministic(f in base_formula(3, 4)) {
        let mut p = Proof::new(Theory::empty());
        p.steps.push(Step::new(Formula::imp(f.clone(), f.clone()), Justification::Taut));
        p.steps.push(Step::new(f, Justification::MP(1, 1)));
        prop_assert_eq!(check_proof(&p), check_proof(&p));
    }
}
