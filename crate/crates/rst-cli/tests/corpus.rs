use std::collections::BTreeSet;

use proptest::prelude::*;
use rst::hfset::{self, HfSet};
use rst::kernel::{check_proof_report, Justification, DERIVED_RULES};
use rst::model::{check_valid, Universe, Validity, DEFAULT_BUDGET};
use rst_cli::corpus::{default_root, entry_dirs, load_entry, run_corpus, Entry};
use rst_cli::hfexpr::{evaluate, Value};

fn entries() -> Vec<Entry> {
    entry_dirs(&default_root()).unwrap().iter().map(|d| load_entry(d).unwrap()).collect()
}

#[test]
fn every_entry_passes() {
    let s = run_corpus(&default_root(), None).unwrap();
    let failed: Vec<_> = s.results.iter().filter(|r| !r.passed).map(|r| (&r.name, &r.detail)).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert!(s.results.len() >= 40);
}

#[test]
fn negative_entries_fail_where_expected() {
    let neg: Vec<Entry> = entries().into_iter().filter(|e| e.name.starts_with("reject-")).collect();
    assert_eq!(neg.len(), 2);
    for e in neg {
        let r = check_proof_report(&e.proof);
        assert!(!r.verdict.ok, "{}", e.name);
        assert_eq!(r.verdict.first_failure.map(|f| f.step), e.expect.fail_step, "{}", e.name);
    }
}

#[test]
fn every_rule_has_a_template_entry() {
    let names: BTreeSet<String> = entries().iter().map(|e| e.name.clone()).collect();
    let mut used = BTreeSet::new();
    for e in entries() {
        for s in &e.proof.steps {
            if let Justification::Derived { rule, .. } = &s.just {
                used.insert(rule.clone());
            }
        }
    }
    for (rule, _) in DERIVED_RULES {
        assert!(names.contains(&format!("rule-{rule}")), "no template entry for {rule}");
    }
    for rule in used {
        assert!(DERIVED_RULES.iter().any(|(r, _)| *r == rule), "unknown rule {rule}");
    }
}

#[test]
fn key_step_markers_are_counted() {
    for e in entries() {
        if let Some(k) = e.expect.key_steps {
            assert_eq!(e.key_steps, k, "{}", e.name);
        }
    }
}

/// Base-language conclusions hold in V_2 and V_3 whenever the axiom
/// instances they rest on do.
#[test]
fn base_conclusions_are_true_in_small_stages() {
    let mut checked = 0;
    for e in entries().into_iter().filter(|e| e.expect.ok) {
        let r = check_proof_report(&e.proof);
        let (Some(last), Some(deps)) = (e.proof.steps.last(), r.axioms.last()) else { continue };
        if !last.formula.is_base() || !deps.iter().all(|d| d.is_base()) {
            continue;
        }
        for k in [2, 3] {
            let u = Universe::stage(k).unwrap();
            let holds = |f| matches!(check_valid(&u, f, DEFAULT_BUDGET), Ok(Validity::Valid));
            if deps.iter().all(holds) {
                assert!(holds(&last.formula), "{} in V_{k}", e.name);
                checked += 1;
            }
        }
    }
    assert!(checked >= 10, "only {checked} checks ran");
}

#[test]
fn intersection_formula_is_valid_in_v3_and_v4() {
    let e = load_entry(&default_root().join("intersection_exists")).unwrap();
    let concl = e.expect.conclusion.unwrap();
    for k in [3, 4] {
        assert!(check_valid(&Universe::stage(k).unwrap(), &concl, DEFAULT_BUDGET).unwrap().is_valid());
    }
}

// Ackermann coding: n encodes the set of decodings of its set bits.
fn decode(n: u64) -> HfSet {
    hfset::make_set((0..64).filter(|i| n >> i & 1 == 1).map(decode))
}

proptest! {
    #[test]
    fn set_literals_evaluate_to_themselves(n in 0u64..(1 << 16)) {
        let a = decode(n);
        prop_assert_eq!(evaluate(&a.to_string(), hfset::DEFAULT_CAP).unwrap(), Value::Set(a));
    }

    #[test]
    fn sminus_inverts_splus(n in 0u64..(1 << 16)) {
        let a = decode(n);
        let v = evaluate(&format!("sminus splus {a}"), hfset::DEFAULT_CAP).unwrap();
        prop_assert_eq!(v, Value::Set(a));
    }

    #[test]
    fn card_counts_distinct_bits(n in 0u64..(1 << 16)) {
        let v = evaluate(&format!("card {}", decode(n)), hfset::DEFAULT_CAP).unwrap();
        prop_assert_eq!(v, Value::Nat(n.count_ones() as usize));
    }
}
